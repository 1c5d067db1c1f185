//
// Copyright 2026 The dpboost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpboost/regression.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "absl/strings/str_cat.h"
#include "dpboost/kernels.h"
#include "dpboost/mechanisms.h"

namespace dpboost {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> AsEigen(const Matrix& m) {
  return Eigen::Map<const RowMajor>(m.data().data(),
                                    static_cast<Eigen::Index>(m.rows()),
                                    static_cast<Eigen::Index>(m.cols()));
}

Matrix FromEigen(const Eigen::MatrixXd& e) {
  Matrix out(static_cast<size_t>(e.rows()), static_cast<size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      out(static_cast<size_t>(i), static_cast<size_t>(j)) = e(i, j);
    }
  }
  return out;
}

absl::Status CheckSymmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.empty()) {
    return absl::InvalidArgumentError("expected a nonempty square matrix");
  }
  if (!AllFinite(m.data())) {
    return absl::InvalidArgumentError("matrix has non-finite entries");
  }
  double scale = 1.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  if (AsymmetryOf(m) > 1e-12 * scale) {
    return absl::InvalidArgumentError("matrix is not symmetric");
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status EncodedDataset::Validate() const {
  if (x.rows() == 0 || x.cols() == 0) {
    return absl::InvalidArgumentError("dataset needs n >= 1 and p >= 1");
  }
  if (y.size() != x.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label count ", y.size(), " != row count ", x.rows()));
  }
  if (!(x_bound > 0.0) || !(y_bound > 0.0) || !std::isfinite(x_bound) ||
      !std::isfinite(y_bound)) {
    return absl::InvalidArgumentError("x_bound and y_bound must be positive");
  }
  if (!AllFinite(x.data()) || !AllFinite(y)) {
    return absl::InvalidArgumentError("dataset has non-finite entries");
  }
  const double slack = 1.0 + 1e-12;
  for (size_t i = 0; i < x.rows(); ++i) {
    if (Norm2(x.row(i)) > x_bound * slack) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", i, " has norm above x_bound ", x_bound));
    }
    if (std::abs(y[i]) > y_bound * slack) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", i, " exceeds y_bound ", y_bound));
    }
  }
  return absl::OkStatus();
}

double MaxRowNorm(const Matrix& x) {
  double out = 0.0;
  for (size_t i = 0; i < x.rows(); ++i) out = std::max(out, Norm2(x.row(i)));
  return out;
}

double MaxAbs(std::span<const double> v) {
  double out = 0.0;
  for (double a : v) out = std::max(out, std::abs(a));
  return out;
}

absl::StatusOr<Matrix> ComputeGram(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) {
    return absl::InvalidArgumentError("gram of an empty matrix");
  }
  if (!AllFinite(x.data())) {
    return absl::InvalidArgumentError("gram input has non-finite entries");
  }
  const size_t p = x.cols();
  Matrix out(p, p);
  kernels::Active().gram_upper(x.data().data(), x.rows(), p, out.data().data());
  for (size_t i = 0; i < p; ++i) {
    for (size_t j = i + 1; j < p; ++j) out(j, i) = out(i, j);
  }
  return out;
}

absl::StatusOr<Vector> ComputeCross(const Matrix& x, std::span<const double> v) {
  if (v.size() != x.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cross term: vector length ", v.size(), " != row count ", x.rows()));
  }
  Vector out(x.cols());
  if (x.cols() == 0) return out;
  kernels::Active().gemv_t(x.data().data(), x.rows(), x.cols(), v.data(),
                           out.data());
  return out;
}

absl::StatusOr<double> MinEigenvalue(const Matrix& m) {
  if (absl::Status s = CheckSymmetric(m); !s.ok()) return s;
  Eigen::MatrixXd dense = AsEigen(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

struct RidgeFactorization::Impl {
  Eigen::LLT<Eigen::MatrixXd> llt;
  size_t dim;
};

absl::StatusOr<RidgeFactorization> RidgeFactorization::Create(const Matrix& gram,
                                                              double lambda) {
  if (absl::Status s = CheckSymmetric(gram); !s.ok()) return s;
  if (!std::isfinite(lambda) || lambda < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("ridge parameter must be finite and >= 0, got ", lambda));
  }
  const size_t p = gram.rows();
  Eigen::MatrixXd system = AsEigen(gram);
  system.diagonal().array() += lambda;
  const double scale =
      std::max(std::abs(system.trace()) / static_cast<double>(p),
               std::numeric_limits<double>::min());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system,
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    return absl::InternalError("eigenvalue iteration did not converge");
  }
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig >= 1e-10 * scale)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "ridge system is near-singular: min eigenvalue ", min_eig,
        " with trace scale ", scale));
  }
  auto impl = std::make_shared<Impl>();
  impl->llt.compute(system);
  impl->dim = p;
  if (impl->llt.info() != Eigen::Success) {
    return absl::FailedPreconditionError("Cholesky factorization failed");
  }
  return RidgeFactorization(std::move(impl));
}

Vector RidgeFactorization::Solve(std::span<const double> rhs) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(),
                                      static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = impl_->llt.solve(b);
  return Vector(x.data(), x.data() + x.size());
}

Matrix RidgeFactorization::Inverse() const {
  const auto p = static_cast<Eigen::Index>(impl_->dim);
  Eigen::MatrixXd inv = impl_->llt.solve(Eigen::MatrixXd::Identity(p, p));
  // Average with the transpose so the cached inverse is exactly symmetric.
  Eigen::MatrixXd sym = 0.5 * (inv + inv.transpose());
  return FromEigen(sym);
}

size_t RidgeFactorization::dim() const { return impl_->dim; }

absl::StatusOr<LinearModel> RidgeSolve(const Matrix& gram, double lambda,
                                       std::span<const double> cross) {
  if (cross.size() != gram.rows()) {
    return absl::InvalidArgumentError("ridge: cross term has wrong length");
  }
  if (!AllFinite(cross)) {
    return absl::InvalidArgumentError("ridge: cross term has non-finite entries");
  }
  absl::StatusOr<RidgeFactorization> factor =
      RidgeFactorization::Create(gram, lambda);
  if (!factor.ok()) return factor.status();
  LinearModel model{factor->Solve(cross)};

  Eigen::MatrixXd system = AsEigen(gram);
  system.diagonal().array() += lambda;
  Eigen::Map<const Eigen::VectorXd> theta(model.theta.data(),
                                          static_cast<Eigen::Index>(model.theta.size()));
  Eigen::Map<const Eigen::VectorXd> b(cross.data(),
                                      static_cast<Eigen::Index>(cross.size()));
  const double residual = (system * theta - b).norm();
  if (!(residual <= 1e-8 * b.norm() + 1e-300)) {
    return absl::FailedPreconditionError(
        absl::StrCat("ridge solve residual ", residual, " too large"));
  }
  return model;
}

absl::StatusOr<double> ResolveLambda(LambdaRule rule, double lambda_hat,
                                     double x_bound, size_t p, double delta,
                                     double mu1) {
  switch (rule) {
    case LambdaRule::kZero:
      return 0.0;
    case LambdaRule::kNoisyMinEigenvalue:
      return std::max(0.0, lambda_hat);
    case LambdaRule::kAdaptiveFloor: {
      if (!(mu1 > 0.0)) {
        return absl::InvalidArgumentError("adaptive lambda needs mu1 > 0");
      }
      const double tail = std::clamp(delta / 6.0, 1e-300, 0.5);
      absl::StatusOr<double> z = NormalQuantile(1.0 - tail);
      if (!z.ok()) return z.status();
      const double target = x_bound * x_bound *
                            std::sqrt(static_cast<double>(p)) * (*z) / mu1;
      return std::max(0.0, target - std::max(0.0, lambda_hat));
    }
  }
  return absl::InvalidArgumentError("unknown lambda rule");
}

absl::Status CheckSplitMatchesBudget(const PrivacyBudget& budget,
                                     const BudgetSplit& split) {
  const double composed = std::sqrt(split.mu1 * split.mu1 +
                                    split.mu2 * split.mu2 +
                                    split.mu3 * split.mu3);
  if (std::abs(composed - budget.mu_total()) >
      1e-12 * std::max(1.0, budget.mu_total())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "budget split composes to ", composed, " but budget is ",
        budget.mu_total()));
  }
  return absl::OkStatus();
}

absl::StatusOr<ReleasedCovariance> ReleaseCovariance(
    const Matrix& x, double x_bound, const PrivacyBudget& budget,
    const BudgetSplit& split, LambdaRule rule, const NoiseDraw& noise,
    PrivacyLedger& ledger) {
  const double sensitivity = x_bound * x_bound;
  absl::StatusOr<Matrix> gram = ComputeGram(x);
  if (!gram.ok()) return gram.status();

  if (absl::Status s = ledger.Record("gram", split.mu1, sensitivity); !s.ok()) {
    return s;
  }
  absl::StatusOr<Matrix> gram_hat = GaussianMechanismSymmetric(
      *gram, sensitivity, split.mu1, noise.Substream("gram"));
  if (!gram_hat.ok()) return gram_hat.status();

  double lambda_hat = 0.0;
  if (split.mu3 > 0.0) {
    absl::StatusOr<double> lambda_min = MinEigenvalue(*gram);
    if (!lambda_min.ok()) return lambda_min.status();
    if (absl::Status s = ledger.Record("lambda", split.mu3, sensitivity);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<double> released = GaussianMechanism(
        *lambda_min, sensitivity, split.mu3, noise.Substream("lambda"));
    if (!released.ok()) return released.status();
    lambda_hat = *released;
  }

  absl::StatusOr<double> lambda_used = ResolveLambda(
      rule, lambda_hat, x_bound, x.cols(), budget.delta(), split.mu1);
  if (!lambda_used.ok()) return lambda_used.status();

  absl::StatusOr<RidgeFactorization> factor =
      RidgeFactorization::Create(*gram_hat, *lambda_used);
  if (!factor.ok()) return factor.status();

  SufficientStats stats;
  stats.gram_hat = *std::move(gram_hat);
  stats.lambda_hat = lambda_hat;
  stats.lambda_used = *lambda_used;
  stats.gamma = factor->Inverse();
  return ReleasedCovariance{std::move(stats), *std::move(factor)};
}

absl::StatusOr<FitResult> AdasspFit(const EncodedDataset& data,
                                    const PrivacyBudget& budget,
                                    const BudgetSplit& split,
                                    const NoiseDraw& noise, LambdaRule rule) {
  if (absl::Status s = CheckSplitMatchesBudget(budget, split); !s.ok()) return s;
  if (data.x.rows() == 0 || data.x.cols() == 0 || data.y.size() != data.x.rows()) {
    return absl::InvalidArgumentError("AdaSSP: malformed dataset");
  }
  if (!(data.x_bound > 0.0) || !(data.y_bound > 0.0)) {
    return absl::InvalidArgumentError("AdaSSP: bounds must be positive");
  }

  Matrix x = data.x;
  for (size_t i = 0; i < x.rows(); ++i) {
    if (absl::Status s = ClipVectorL2InPlace(x.row(i), data.x_bound); !s.ok()) {
      return s;
    }
  }
  Vector y(data.y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    absl::StatusOr<double> c = ClipScalar(data.y[i], data.y_bound);
    if (!c.ok()) return c.status();
    y[i] = *c;
  }

  FitResult result;
  result.ledger = PrivacyLedger(budget.mu_total());
  absl::StatusOr<ReleasedCovariance> cov = ReleaseCovariance(
      x, data.x_bound, budget, split, rule, noise, result.ledger);
  if (!cov.ok()) return cov.status();

  absl::StatusOr<Vector> cross = ComputeCross(x, y);
  if (!cross.ok()) return cross.status();
  const double cross_sensitivity = data.x_bound * data.y_bound;
  if (absl::Status s = result.ledger.Record("cross/1", split.mu2, cross_sensitivity);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Vector> cross_hat = GaussianMechanism(
      *cross, cross_sensitivity, split.mu2, noise.Substream("cross/1"));
  if (!cross_hat.ok()) return cross_hat.status();

  result.model.theta = cov->factor.Solve(*cross_hat);
  if (!AllFinite(result.model.theta)) {
    return absl::InternalError("AdaSSP produced non-finite coefficients");
  }
  result.stats = std::move(cov->stats);
  return result;
}

}  // namespace dpboost
