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

#include "dpboost/boosting.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "dpboost/kernels.h"
#include "dpboost/mechanisms.h"

namespace dpboost {

absl::Status BoostConfig::Validate() const {
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds must be >= 1, got ", rounds));
  }
  if (!std::isfinite(tau) || tau <= 0.0) {
    return absl::InvalidArgumentError(absl::StrCat("tau must be > 0, got ", tau));
  }
  if (!std::isfinite(x_clip) || x_clip <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("x_clip must be > 0, got ", x_clip));
  }
  return absl::OkStatus();
}

absl::StatusOr<Vector> Predict(const Matrix& x, const LinearModel& model) {
  if (model.theta.size() != x.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "predict: model has ", model.theta.size(), " coefficients, data has ",
        x.cols(), " columns"));
  }
  Vector out(x.rows(), 0.0);
  if (x.rows() == 0 || x.cols() == 0) return out;
  kernels::Active().gemv(x.data().data(), x.rows(), x.cols(),
                         model.theta.data(), out.data());
  return out;
}

absl::StatusOr<Vector> Residuals(std::span<const double> y, const Matrix& x,
                                 std::span<const double> theta) {
  if (y.size() != x.rows()) {
    return absl::InvalidArgumentError("residuals: label count != row count");
  }
  absl::StatusOr<Vector> pred =
      Predict(x, LinearModel{Vector(theta.begin(), theta.end())});
  if (!pred.ok()) return pred.status();
  for (size_t i = 0; i < y.size(); ++i) (*pred)[i] = y[i] - (*pred)[i];
  return pred;
}

absl::StatusOr<BoostResult> BoostedAdasspFit(const EncodedDataset& data,
                                             const PrivacyBudget& budget,
                                             const BoostConfig& config,
                                             const NoiseDraw& noise) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const size_t n = data.x.rows();
  const size_t p = data.x.cols();
  if (n == 0 || p == 0 || data.y.size() != n) {
    return absl::InvalidArgumentError("boosting: malformed dataset");
  }
  if (!AllFinite(data.y)) {
    return absl::InvalidArgumentError("boosting: non-finite labels");
  }
  absl::StatusOr<BudgetSplit> split = SplitBudget(budget.mu_total(), config.split);
  if (!split.ok()) return split.status();
  absl::StatusOr<double> mu_round = PerRoundBudget(split->mu2, config.rounds);
  if (!mu_round.ok()) return mu_round.status();

  Matrix x = data.x;
  for (size_t i = 0; i < n; ++i) {
    if (absl::Status s = ClipVectorL2InPlace(x.row(i), config.x_clip); !s.ok()) {
      return s;
    }
  }

  BoostResult result;
  result.ledger = PrivacyLedger(budget.mu_total());
  absl::StatusOr<ReleasedCovariance> cov =
      ReleaseCovariance(x, config.x_clip, budget, *split, config.lambda_rule,
                        noise, result.ledger);
  if (!cov.ok()) return cov.status();

  const kernels::KernelTable& k = kernels::Active();
  const double cross_sensitivity = config.x_clip * config.tau;
  Vector theta(p, 0.0);
  Vector pred(n, 0.0);
  Vector grad(n, 0.0);
  Vector cross(p, 0.0);
  result.cross_sum.assign(p, 0.0);
  result.round_thetas.reserve(config.rounds);
  result.theta_path.reserve(config.rounds);

  for (int t = 1; t <= config.rounds; ++t) {
    k.gemv(x.data().data(), n, p, theta.data(), pred.data());
    k.clipped_residuals(data.y.data(), pred.data(), n, config.tau, grad.data());
    k.gemv_t(x.data().data(), n, p, grad.data(), cross.data());

    const std::string label = absl::StrCat("cross/", t);
    if (absl::Status s = result.ledger.Record(label, *mu_round, cross_sensitivity);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<Vector> cross_hat = GaussianMechanism(
        cross, cross_sensitivity, *mu_round, noise.Substream(label));
    if (!cross_hat.ok()) return cross_hat.status();

    Vector step = cov->factor.Solve(*cross_hat);
    for (size_t j = 0; j < p; ++j) {
      theta[j] += step[j];
      result.cross_sum[j] += (*cross_hat)[j];
    }
    if (!AllFinite(theta)) {
      return absl::InternalError(
          absl::StrCat("boosting diverged to non-finite coefficients at round ", t));
    }
    result.round_thetas.push_back(std::move(step));
    result.theta_path.push_back(theta);
  }

  result.model.theta = std::move(theta);
  result.stats = std::move(cov->stats);
  return result;
}

}  // namespace dpboost
