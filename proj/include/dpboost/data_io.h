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

// Tabular ingestion. The schema (column kinds, category lists, label) is
// treated as public; only cell values are private.

#ifndef DPBOOST_DATA_IO_H_
#define DPBOOST_DATA_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpboost/matrix.h"
#include "dpboost/regression.h"
#include "nlohmann/json_fwd.hpp"

namespace dpboost {

enum class ColumnKind { kNumeric, kCategorical };
enum class Task { kRegression, kClassification };

absl::string_view TaskName(Task task);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<std::string> categories;  // categorical only, in encoding order
};

// JSON form:
//   {"label": "y", "task": "regression" | "classification",
//    "positive_class": "yes", "add_intercept": false,
//    "columns": [{"name": "a", "kind": "numeric"},
//                {"name": "c", "kind": "categorical", "categories": ["x","y"]}]}
// A classification label must be categorical with exactly two categories;
// a regression label must be numeric.
struct Schema {
  std::vector<ColumnSpec> columns;
  std::string label;
  Task task = Task::kRegression;
  std::string positive_class;
  bool add_intercept = false;

  absl::Status Validate() const;
  const ColumnSpec* Find(absl::string_view name) const;

  static absl::StatusOr<Schema> FromJson(const nlohmann::json& json);
  nlohmann::json ToJson() const;
};

absl::StatusOr<Schema> LoadSchema(const std::string& path);

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> numeric;  // kNumeric
  std::vector<int> codes;       // kCategorical, index into the category list
};

// Columns follow schema order regardless of the file's header order.
struct RawTable {
  std::vector<RawColumn> columns;
  size_t row_count = 0;
};

// RFC 4180-style parsing: comma separator, double-quote quoting with ""
// escapes, LF or CRLF line ends. Empty cells are missing values and rejected.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsvRecords(
    absl::string_view text);
absl::StatusOr<RawTable> ParseCsv(absl::string_view text, const Schema& schema);
absl::StatusOr<RawTable> LoadCsv(const std::string& path, const Schema& schema);

// Categorical features expand to one indicator column per category; numeric
// features pass through; an all-ones "intercept" column is appended when the
// schema asks for it. Classification labels map to +1 (positive class) and -1.
// x_bound and y_bound describe the raw encoded data (max row norm, max |y|).
absl::StatusOr<EncodedDataset> OneHotEncode(const RawTable& table,
                                            const Schema& schema);

// Category of every row for one categorical source column.
absl::StatusOr<std::vector<std::string>> DecodeCategorical(
    const EncodedDataset& data, absl::string_view column);

struct DataSplit {
  EncodedDataset train;
  EncodedDataset test;
  std::vector<size_t> train_indices;  // ascending
  std::vector<size_t> test_indices;   // ascending
};

// Seeded Fisher-Yates shuffle; |test| = round(test_fraction * n).
absl::StatusOr<DataSplit> TrainTestSplit(const EncodedDataset& data,
                                         double test_fraction, uint64_t seed);

EncodedDataset SelectRows(const EncodedDataset& data,
                          const std::vector<size_t>& rows);

// Clips every row to ||x|| <= x_clip and sets x_bound = x_clip. With
// clip_labels, labels are clipped to tau_label and y_bound = tau_label.
// Without, labels are left alone (the boosted learner clips residuals
// itself) and y_bound = max(tau_label, max |y|) so the dataset stays valid.
absl::StatusOr<EncodedDataset> Preprocess(const EncodedDataset& data,
                                          double x_clip, double tau_label,
                                          bool clip_labels);

// Linear model with Gaussian design: x ~ N(0, feature_sd^2 I) clipped to the
// unit ball, y = label_scale * (x^T theta_star + noise_sd * z). For
// classification, y = sign(x^T theta_star + noise_sd * z) with sign(0) = +1.
struct SyntheticOptions {
  int n = 1000;
  std::vector<double> theta_star = {1.0, -1.0};
  double feature_sd = 0.5;
  double noise_sd = 0.1;
  double label_scale = 1.0;
  Task task = Task::kRegression;
  uint64_t seed = 0;
};

absl::StatusOr<EncodedDataset> MakeSyntheticDataset(const SyntheticOptions& options);

}  // namespace dpboost

#endif  // DPBOOST_DATA_IO_H_
