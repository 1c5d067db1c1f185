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

// Gradient boosting of private linear models with a fixed, once-released
// covariance. Each round fits the clipped residuals of the current additive
// model; only the cross term X^T g_t is re-released, at mu2 / sqrt(T).

#ifndef DPBOOST_BOOSTING_H_
#define DPBOOST_BOOSTING_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpboost/matrix.h"
#include "dpboost/noise.h"
#include "dpboost/privacy.h"
#include "dpboost/regression.h"

namespace dpboost {

struct BoostConfig {
  int rounds = 1;
  double tau = 1.0;     // residual clipping threshold
  double x_clip = 1.0;  // feature-norm bound
  SplitRatio split;
  LambdaRule lambda_rule = LambdaRule::kAdaptiveFloor;

  absl::Status Validate() const;
};

// y - X theta.
absl::StatusOr<Vector> Residuals(std::span<const double> y, const Matrix& x,
                                 std::span<const double> theta);

// X theta.
absl::StatusOr<Vector> Predict(const Matrix& x, const LinearModel& model);

struct BoostResult {
  LinearModel model;
  SufficientStats stats;
  PrivacyLedger ledger{0.0};
  // theta_t for t = 1..T, and the accumulated model after each round.
  std::vector<Vector> round_thetas;
  std::vector<Vector> theta_path;
  // Sum over rounds of the released cross terms.
  Vector cross_sum;
};

// Rows of data.x are clipped to config.x_clip. Streams used:
// "<label>/gram", "<label>/lambda", "<label>/cross/<t>" for t = 1..T, so with
// T = 1 and tau = data.y_bound the output matches AdasspFit under the same
// NoiseDraw.
absl::StatusOr<BoostResult> BoostedAdasspFit(const EncodedDataset& data,
                                             const PrivacyBudget& budget,
                                             const BoostConfig& config,
                                             const NoiseDraw& noise);

}  // namespace dpboost

#endif  // DPBOOST_BOOSTING_H_
