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

// Sufficient statistics, ridge solves and the single-shot AdaSSP learner.
//
// Neighbouring datasets differ by adding or removing one record. With rows
// bounded by ||x|| <= x_bound and labels by |y| <= y_bound the released
// statistics have l2-sensitivity
//   X^T X            : x_bound^2   (Frobenius)
//   X^T y            : x_bound * y_bound
//   lambda_min(X^T X): x_bound^2   (Weyl)

#ifndef DPBOOST_REGRESSION_H_
#define DPBOOST_REGRESSION_H_

#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpboost/matrix.h"
#include "dpboost/noise.h"
#include "dpboost/privacy.h"

namespace dpboost {

// Columns of the design matrix that came from one source column. Numeric
// columns have width 1 and no categories.
struct FeatureBlock {
  std::string column;
  size_t offset = 0;
  size_t width = 1;
  std::vector<std::string> categories;
};

struct EncodedDataset {
  Matrix x;  // n x p, rows are samples
  Vector y;  // length n
  double x_bound = 0.0;
  double y_bound = 0.0;
  std::vector<std::string> feature_names;
  std::vector<FeatureBlock> blocks;

  size_t n() const { return x.rows(); }
  size_t p() const { return x.cols(); }

  // Shapes, finiteness, and ||x_i|| <= x_bound, |y_i| <= y_bound.
  absl::Status Validate() const;
};

// Largest row norm and largest |label|, for describing raw data.
double MaxRowNorm(const Matrix& x);
double MaxAbs(std::span<const double> v);

struct LinearModel {
  Vector theta;
};

// How the ridge parameter is derived from the released minimum eigenvalue.
enum class LambdaRule {
  // lambda = max(0, lambda_target - max(0, lambda_hat)) with
  // lambda_target = x_bound^2 sqrt(p) z_{1 - delta/6} / mu1: just enough
  // regularization to dominate the matrix noise with high probability.
  kAdaptiveFloor,
  // lambda = max(0, lambda_hat), the released eigenvalue used directly.
  kNoisyMinEigenvalue,
  // lambda = 0. Only meaningful for (near) noiseless budgets.
  kZero,
};

struct SufficientStats {
  Matrix gram_hat;            // released X^T X
  double lambda_hat = 0.0;    // released lambda_min(X^T X)
  double lambda_used = 0.0;   // ridge parameter actually applied
  Matrix gamma;               // (gram_hat + lambda_used I)^{-1}
};

// X^T X, exactly symmetric.
absl::StatusOr<Matrix> ComputeGram(const Matrix& x);

// X^T v.
absl::StatusOr<Vector> ComputeCross(const Matrix& x, std::span<const double> v);

// Smallest eigenvalue of a symmetric matrix.
absl::StatusOr<double> MinEigenvalue(const Matrix& m);

// Cholesky factorization of gram + lambda I, reusable across right-hand
// sides.
class RidgeFactorization {
 public:
  // Fails with kFailedPrecondition when the system is not positive definite
  // with margin 1e-10 * (trace / p).
  static absl::StatusOr<RidgeFactorization> Create(const Matrix& gram,
                                                   double lambda);

  Vector Solve(std::span<const double> rhs) const;
  Matrix Inverse() const;
  size_t dim() const;

 private:
  struct Impl;
  explicit RidgeFactorization(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Solves (gram + lambda I) theta = cross.
absl::StatusOr<LinearModel> RidgeSolve(const Matrix& gram, double lambda,
                                       std::span<const double> cross);

// Resolves the ridge parameter from the released eigenvalue.
absl::StatusOr<double> ResolveLambda(LambdaRule rule, double lambda_hat,
                                     double x_bound, size_t p, double delta,
                                     double mu1);

// Output of the one-time second-moment releases shared by AdaSSP and its
// boosted variant.
struct ReleasedCovariance {
  SufficientStats stats;
  RidgeFactorization factor;
};

// Releases X^T X at mu1 and lambda_min(X^T X) at mu3 (skipped when mu3 == 0)
// on streams "<label>/gram" and "<label>/lambda", records both in `ledger`,
// and factors the regularized system. Rows of `x` must already satisfy
// ||x_i|| <= x_bound.
absl::StatusOr<ReleasedCovariance> ReleaseCovariance(
    const Matrix& x, double x_bound, const PrivacyBudget& budget,
    const BudgetSplit& split, LambdaRule rule, const NoiseDraw& noise,
    PrivacyLedger& ledger);

struct FitResult {
  LinearModel model;
  SufficientStats stats;
  PrivacyLedger ledger{0.0};
};

// Single-shot AdaSSP. Rows are clipped to data.x_bound and labels to
// data.y_bound before any statistic is computed; the cross term X^T y is
// released at mu2 on stream "<label>/cross/1".
absl::StatusOr<FitResult> AdasspFit(const EncodedDataset& data,
                                    const PrivacyBudget& budget,
                                    const BudgetSplit& split,
                                    const NoiseDraw& noise,
                                    LambdaRule rule = LambdaRule::kAdaptiveFloor);

// Checks that split composes to budget.mu_total() within 1e-12 (relative).
absl::Status CheckSplitMatchesBudget(const PrivacyBudget& budget,
                                     const BudgetSplit& split);

}  // namespace dpboost

#endif  // DPBOOST_REGRESSION_H_
