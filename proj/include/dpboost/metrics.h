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

// Evaluation metrics. Classification labels are in {-1, +1} and scores are
// raw model outputs.

#ifndef DPBOOST_METRICS_H_
#define DPBOOST_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dpboost {

absl::StatusOr<double> Mse(std::span<const double> y_true,
                           std::span<const double> y_pred);

// Predicts sign(score) with sign(0) = +1; F1 = 2TP / (2TP + FP + FN), or 0
// when the denominator vanishes.
absl::StatusOr<double> F1AtZero(std::span<const double> y_true,
                                std::span<const double> scores);

// Mann-Whitney form: P(score_pos > score_neg) + P(tie) / 2.
absl::StatusOr<double> Auroc(std::span<const double> y_true,
                             std::span<const double> scores);

// Step integral of precision over recall, sweeping thresholds from the
// highest score down. Tied scores form a single threshold.
absl::StatusOr<double> Auprc(std::span<const double> y_true,
                             std::span<const double> scores);

// "mse", "f1", "auroc", "auprc".
absl::StatusOr<double> ComputeMetric(absl::string_view name,
                                     std::span<const double> y_true,
                                     std::span<const double> scores);

bool LowerIsBetter(absl::string_view metric);

}  // namespace dpboost

#endif  // DPBOOST_METRICS_H_
