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

#include "dpboost/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "dpboost/matrix.h"

namespace dpboost {
namespace {

absl::Status CheckPair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("length mismatch: ", a.size(), " vs ", b.size()));
  }
  if (a.empty()) return absl::InvalidArgumentError("empty input");
  if (!AllFinite(a) || !AllFinite(b)) {
    return absl::InvalidArgumentError("non-finite input");
  }
  return absl::OkStatus();
}

absl::Status CheckBinary(std::span<const double> y, std::span<const double> s) {
  if (absl::Status st = CheckPair(y, s); !st.ok()) return st;
  for (double v : y) {
    if (v != 1.0 && v != -1.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("labels must be -1 or +1, got ", v));
    }
  }
  return absl::OkStatus();
}

// Indices ordered by score, descending.
std::vector<size_t> OrderByScore(std::span<const double> scores) {
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

absl::StatusOr<double> Mse(std::span<const double> y_true,
                           std::span<const double> y_pred) {
  if (absl::Status s = CheckPair(y_true, y_pred); !s.ok()) return s;
  double sum = 0.0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    sum += d * d;
  }
  return sum / static_cast<double>(y_true.size());
}

absl::StatusOr<double> F1AtZero(std::span<const double> y_true,
                                std::span<const double> scores) {
  if (absl::Status s = CheckBinary(y_true, scores); !s.ok()) return s;
  double tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    const bool predicted = scores[i] >= 0.0;
    const bool actual = y_true[i] > 0.0;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2 * tp / denom;
}

absl::StatusOr<double> Auroc(std::span<const double> y_true,
                             std::span<const double> scores) {
  if (absl::Status s = CheckBinary(y_true, scores); !s.ok()) return s;
  const std::vector<size_t> order = OrderByScore(scores);
  double positives = 0, negatives = 0;
  for (double v : y_true) (v > 0 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    return absl::InvalidArgumentError("AUROC needs both classes");
  }
  // Walk groups of tied scores from the top; each positive beats every
  // negative below its group and ties half of those inside it.
  double wins = 0.0;
  double negatives_above = 0.0;
  for (size_t start = 0; start < order.size();) {
    size_t end = start;
    double pos = 0, neg = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (y_true[order[end]] > 0 ? pos : neg) += 1;
      ++end;
    }
    const double negatives_below = negatives - negatives_above - neg;
    wins += pos * (negatives_below + 0.5 * neg);
    negatives_above += neg;
    start = end;
  }
  return wins / (positives * negatives);
}

absl::StatusOr<double> Auprc(std::span<const double> y_true,
                             std::span<const double> scores) {
  if (absl::Status s = CheckBinary(y_true, scores); !s.ok()) return s;
  double positives = 0;
  for (double v : y_true) positives += v > 0 ? 1 : 0;
  if (positives == 0) return absl::InvalidArgumentError("AUPRC needs a positive");
  const std::vector<size_t> order = OrderByScore(scores);
  double tp = 0, fp = 0, area = 0;
  for (size_t start = 0; start < order.size();) {
    size_t end = start;
    double pos = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      if (y_true[order[end]] > 0) {
        ++pos;
      } else {
        ++fp;
      }
      ++end;
    }
    tp += pos;
    if (pos > 0) area += (pos / positives) * (tp / (tp + fp));
    start = end;
  }
  return area;
}

absl::StatusOr<double> ComputeMetric(absl::string_view name,
                                     std::span<const double> y_true,
                                     std::span<const double> scores) {
  if (name == "mse") return Mse(y_true, scores);
  if (name == "f1") return F1AtZero(y_true, scores);
  if (name == "auroc") return Auroc(y_true, scores);
  if (name == "auprc") return Auprc(y_true, scores);
  return absl::InvalidArgumentError(absl::StrCat("unknown metric '", name, "'"));
}

bool LowerIsBetter(absl::string_view metric) { return metric == "mse"; }

}  // namespace dpboost
