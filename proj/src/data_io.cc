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

#include "dpboost/data_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "dpboost/mechanisms.h"
#include "dpboost/noise.h"
#include "nlohmann/json.hpp"

namespace dpboost {
namespace {

using json = nlohmann::json;

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return absl::DataLossError(absl::StrCat("error reading ", path));
  return buf.str();
}

// Splits CSV text into records of fields. Blank lines are skipped.
absl::StatusOr<std::vector<std::vector<std::string>>> SplitCsv(
    absl::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields a single empty field; skip it.
    if (!(record.size() == 1 && record[0].empty())) {
      records.push_back(std::move(record));
    }
    record.clear();
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", line, ": stray quote inside unquoted field"));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError("unterminated quoted field at end of file");
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

absl::string_view Trim(absl::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsvRecords(
    absl::string_view text) {
  return SplitCsv(text);
}

absl::string_view TaskName(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

const ColumnSpec* Schema::Find(absl::string_view name) const {
  for (const ColumnSpec& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

absl::Status Schema::Validate() const {
  if (columns.empty()) return absl::InvalidArgumentError("schema has no columns");
  std::set<std::string> names;
  for (const ColumnSpec& c : columns) {
    if (c.name.empty()) return absl::InvalidArgumentError("empty column name");
    if (!names.insert(c.name).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate column ", c.name));
    }
    if (c.kind == ColumnKind::kCategorical) {
      if (c.categories.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("categorical column ", c.name, " has no categories"));
      }
      std::set<std::string> seen(c.categories.begin(), c.categories.end());
      if (seen.size() != c.categories.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("categorical column ", c.name, " repeats a category"));
      }
    } else if (!c.categories.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("numeric column ", c.name, " lists categories"));
    }
  }
  const ColumnSpec* label_col = Find(label);
  if (label_col == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("label column '", label, "' is not in the schema"));
  }
  if (columns.size() < 2) {
    return absl::InvalidArgumentError("schema needs at least one feature column");
  }
  if (task == Task::kRegression) {
    if (label_col->kind != ColumnKind::kNumeric) {
      return absl::InvalidArgumentError("regression label must be numeric");
    }
  } else {
    if (label_col->kind != ColumnKind::kCategorical ||
        label_col->categories.size() != 2) {
      return absl::InvalidArgumentError(
          "classification label must be categorical with two categories");
    }
    if (std::find(label_col->categories.begin(), label_col->categories.end(),
                  positive_class) == label_col->categories.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "positive class '", positive_class, "' is not a label category"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Schema> Schema::FromJson(const json& j) {
  try {
    if (!j.is_object()) return absl::InvalidArgumentError("schema must be an object");
    Schema schema;
    schema.label = j.at("label").get<std::string>();
    const std::string task = j.value("task", std::string("regression"));
    if (task == "regression") {
      schema.task = Task::kRegression;
    } else if (task == "classification") {
      schema.task = Task::kClassification;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown task '", task, "'"));
    }
    schema.positive_class = j.value("positive_class", std::string());
    schema.add_intercept = j.value("add_intercept", false);
    for (const json& col : j.at("columns")) {
      ColumnSpec spec;
      spec.name = col.at("name").get<std::string>();
      const std::string kind = col.value("kind", std::string("numeric"));
      if (kind == "numeric") {
        spec.kind = ColumnKind::kNumeric;
      } else if (kind == "categorical") {
        spec.kind = ColumnKind::kCategorical;
        spec.categories = col.at("categories").get<std::vector<std::string>>();
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("column ", spec.name, ": unknown kind '", kind, "'"));
      }
      schema.columns.push_back(std::move(spec));
    }
    if (absl::Status s = schema.Validate(); !s.ok()) return s;
    return schema;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed schema: ", e.what()));
  }
}

json Schema::ToJson() const {
  json cols = json::array();
  for (const ColumnSpec& c : columns) {
    json col = {{"name", c.name},
                {"kind", c.kind == ColumnKind::kNumeric ? "numeric" : "categorical"}};
    if (c.kind == ColumnKind::kCategorical) col["categories"] = c.categories;
    cols.push_back(std::move(col));
  }
  json out = {{"label", label},
              {"task", std::string(TaskName(task))},
              {"add_intercept", add_intercept},
              {"columns", std::move(cols)}};
  if (task == Task::kClassification) out["positive_class"] = positive_class;
  return out;
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  return Schema::FromJson(j);
}

absl::StatusOr<RawTable> ParseCsv(absl::string_view text, const Schema& schema) {
  if (absl::Status s = schema.Validate(); !s.ok()) return s;
  absl::StatusOr<std::vector<std::vector<std::string>>> records = SplitCsv(text);
  if (!records.ok()) return records.status();
  if (records->empty()) return absl::InvalidArgumentError("CSV has no header row");

  const std::vector<std::string>& header = (*records)[0];
  if (header.size() != schema.columns.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "header has ", header.size(), " columns, schema has ",
        schema.columns.size()));
  }
  // file column index -> schema column index
  std::vector<size_t> target(header.size());
  std::vector<bool> seen(schema.columns.size(), false);
  for (size_t f = 0; f < header.size(); ++f) {
    const absl::string_view name = Trim(header[f]);
    size_t s = 0;
    while (s < schema.columns.size() && schema.columns[s].name != name) ++s;
    if (s == schema.columns.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("header column '", name, "' is not in the schema"));
    }
    if (seen[s]) {
      return absl::InvalidArgumentError(
          absl::StrCat("header repeats column '", name, "'"));
    }
    seen[s] = true;
    target[f] = s;
  }

  const size_t rows = records->size() - 1;
  if (rows == 0) return absl::InvalidArgumentError("CSV has no rows");

  std::vector<absl::flat_hash_map<std::string, int>> category_index(
      schema.columns.size());
  RawTable table;
  table.row_count = rows;
  table.columns.resize(schema.columns.size());
  for (size_t s = 0; s < schema.columns.size(); ++s) {
    const ColumnSpec& spec = schema.columns[s];
    table.columns[s].name = spec.name;
    table.columns[s].kind = spec.kind;
    if (spec.kind == ColumnKind::kNumeric) {
      table.columns[s].numeric.resize(rows);
    } else {
      table.columns[s].codes.resize(rows);
      for (size_t k = 0; k < spec.categories.size(); ++k) {
        category_index[s][spec.categories[k]] = static_cast<int>(k);
      }
    }
  }

  for (size_t r = 0; r < rows; ++r) {
    const std::vector<std::string>& record = (*records)[r + 1];
    // Data rows are reported 1-based, header excluded.
    const size_t row_no = r + 1;
    if (record.size() != header.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", row_no, ": expected ", header.size(), " fields, got ",
          record.size()));
    }
    for (size_t f = 0; f < record.size(); ++f) {
      const size_t s = target[f];
      const ColumnSpec& spec = schema.columns[s];
      const absl::string_view cell = Trim(record[f]);
      if (cell.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", row_no, ", column '", spec.name, "': missing value"));
      }
      if (spec.kind == ColumnKind::kNumeric) {
        double v;
        if (!absl::SimpleAtod(cell, &v) || !std::isfinite(v)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row ", row_no, ", column '", spec.name, "': cannot parse '",
              cell, "' as a finite number"));
        }
        table.columns[s].numeric[r] = v;
      } else {
        auto it = category_index[s].find(std::string(cell));
        if (it == category_index[s].end()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row ", row_no, ", column '", spec.name, "': unknown category '",
              cell, "'"));
        }
        table.columns[s].codes[r] = it->second;
      }
    }
  }
  return table;
}

absl::StatusOr<RawTable> LoadCsv(const std::string& path, const Schema& schema) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<RawTable> table = ParseCsv(*text, schema);
  if (!table.ok()) {
    return absl::Status(table.status().code(),
                        absl::StrCat(path, ": ", table.status().message()));
  }
  return table;
}

absl::StatusOr<EncodedDataset> OneHotEncode(const RawTable& table,
                                            const Schema& schema) {
  if (absl::Status s = schema.Validate(); !s.ok()) return s;
  if (table.columns.size() != schema.columns.size()) {
    return absl::InvalidArgumentError("table does not match schema");
  }
  if (table.row_count == 0) return absl::InvalidArgumentError("table has no rows");

  EncodedDataset out;
  size_t label_index = 0;
  for (size_t s = 0; s < schema.columns.size(); ++s) {
    const ColumnSpec& spec = schema.columns[s];
    if (table.columns[s].name != spec.name || table.columns[s].kind != spec.kind) {
      return absl::InvalidArgumentError(
          absl::StrCat("table column ", s, " does not match schema"));
    }
    if (spec.name == schema.label) {
      label_index = s;
      continue;
    }
    FeatureBlock block;
    block.column = spec.name;
    block.offset = out.feature_names.size();
    if (spec.kind == ColumnKind::kNumeric) {
      block.width = 1;
      out.feature_names.push_back(spec.name);
    } else {
      block.width = spec.categories.size();
      block.categories = spec.categories;
      for (const std::string& cat : spec.categories) {
        out.feature_names.push_back(absl::StrCat(spec.name, "=", cat));
      }
    }
    out.blocks.push_back(std::move(block));
  }
  if (schema.add_intercept) {
    out.blocks.push_back({"intercept", out.feature_names.size(), 1, {}});
    out.feature_names.push_back("intercept");
  }

  const size_t n = table.row_count;
  const size_t p = out.feature_names.size();
  out.x = Matrix(n, p);
  size_t b = 0;
  for (size_t s = 0; s < schema.columns.size(); ++s) {
    if (s == label_index) continue;
    const RawColumn& col = table.columns[s];
    const FeatureBlock& block = out.blocks[b++];
    for (size_t r = 0; r < n; ++r) {
      if (col.kind == ColumnKind::kNumeric) {
        out.x(r, block.offset) = col.numeric[r];
      } else {
        out.x(r, block.offset + static_cast<size_t>(col.codes[r])) = 1.0;
      }
    }
  }
  if (schema.add_intercept) {
    for (size_t r = 0; r < n; ++r) out.x(r, p - 1) = 1.0;
  }

  const RawColumn& label = table.columns[label_index];
  out.y.resize(n);
  if (schema.task == Task::kRegression) {
    out.y = label.numeric;
  } else {
    const ColumnSpec& spec = schema.columns[label_index];
    const int positive = static_cast<int>(
        std::find(spec.categories.begin(), spec.categories.end(),
                  schema.positive_class) -
        spec.categories.begin());
    for (size_t r = 0; r < n; ++r) out.y[r] = label.codes[r] == positive ? 1.0 : -1.0;
  }
  out.x_bound = MaxRowNorm(out.x);
  out.y_bound = MaxAbs(out.y);
  return out;
}

absl::StatusOr<std::vector<std::string>> DecodeCategorical(
    const EncodedDataset& data, absl::string_view column) {
  const FeatureBlock* block = nullptr;
  for (const FeatureBlock& b : data.blocks) {
    if (b.column == column) block = &b;
  }
  if (block == nullptr || block->categories.empty()) {
    return absl::NotFoundError(
        absl::StrCat("no categorical block for column '", column, "'"));
  }
  std::vector<std::string> out(data.n());
  for (size_t r = 0; r < data.n(); ++r) {
    int hot = -1;
    for (size_t k = 0; k < block->width; ++k) {
      const double v = data.x(r, block->offset + k);
      if (v == 1.0 && hot < 0) {
        hot = static_cast<int>(k);
      } else if (v != 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", r, " is not a one-hot indicator for ", column));
      }
    }
    if (hot < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has no active indicator for ", column));
    }
    out[r] = block->categories[hot];
  }
  return out;
}

EncodedDataset SelectRows(const EncodedDataset& data,
                          const std::vector<size_t>& rows) {
  EncodedDataset out;
  out.x = Matrix(rows.size(), data.p());
  out.y.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy(data.x.row(rows[i]).begin(), data.x.row(rows[i]).end(),
              out.x.row(i).begin());
    out.y[i] = data.y[rows[i]];
  }
  out.x_bound = data.x_bound;
  out.y_bound = data.y_bound;
  out.feature_names = data.feature_names;
  out.blocks = data.blocks;
  return out;
}

absl::StatusOr<DataSplit> TrainTestSplit(const EncodedDataset& data,
                                         double test_fraction, uint64_t seed) {
  const size_t n = data.n();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("test fraction must be in (0, 1), got ", test_fraction));
  }
  if (n < 2 || data.y.size() != n) {
    return absl::InvalidArgumentError("need at least two rows to split");
  }
  const size_t test_size =
      static_cast<size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (test_size == 0 || test_size >= n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "test fraction ", test_fraction, " leaves an empty side for n=", n));
  }
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  NoiseStream stream(NoiseDraw{seed, "split"});
  for (size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[stream.NextBelow(i + 1)]);
  }
  DataSplit split;
  split.test_indices.assign(perm.begin(), perm.begin() + test_size);
  split.train_indices.assign(perm.begin() + test_size, perm.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  split.train = SelectRows(data, split.train_indices);
  split.test = SelectRows(data, split.test_indices);
  return split;
}

absl::StatusOr<EncodedDataset> Preprocess(const EncodedDataset& data,
                                          double x_clip, double tau_label,
                                          bool clip_labels) {
  if (!std::isfinite(x_clip) || x_clip <= 0.0 || !std::isfinite(tau_label) ||
      tau_label <= 0.0) {
    return absl::InvalidArgumentError("clipping bounds must be finite and positive");
  }
  if (data.y.size() != data.n() || data.n() == 0 || data.p() == 0) {
    return absl::InvalidArgumentError("malformed dataset");
  }
  EncodedDataset out = data;
  for (size_t i = 0; i < out.n(); ++i) {
    if (absl::Status s = ClipVectorL2InPlace(out.x.row(i), x_clip); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat("row ", i, ": ", s.message()));
    }
  }
  out.x_bound = x_clip;
  if (clip_labels) {
    for (double& v : out.y) {
      absl::StatusOr<double> c = ClipScalar(v, tau_label);
      if (!c.ok()) return c.status();
      v = *c;
    }
    out.y_bound = tau_label;
  } else {
    if (!AllFinite(out.y)) return absl::InvalidArgumentError("non-finite labels");
    out.y_bound = std::max(tau_label, MaxAbs(out.y));
  }
  if (absl::Status s = out.Validate(); !s.ok()) return s;
  return out;
}

absl::StatusOr<EncodedDataset> MakeSyntheticDataset(const SyntheticOptions& options) {
  if (options.n < 1 || options.theta_star.empty()) {
    return absl::InvalidArgumentError("synthetic data needs n >= 1 and p >= 1");
  }
  if (!(options.feature_sd > 0.0) || options.noise_sd < 0.0 ||
      !std::isfinite(options.label_scale)) {
    return absl::InvalidArgumentError("invalid synthetic data parameters");
  }
  const size_t n = static_cast<size_t>(options.n);
  const size_t p = options.theta_star.size();
  EncodedDataset out;
  out.x = Matrix(n, p);
  out.y.resize(n);
  NoiseStream features(NoiseDraw{options.seed, "synthetic/x"});
  NoiseStream noise(NoiseDraw{options.seed, "synthetic/noise"});
  for (size_t i = 0; i < n; ++i) {
    std::span<double> row = out.x.row(i);
    for (double& v : row) v = options.feature_sd * features.NextGaussian();
    if (absl::Status s = ClipVectorL2InPlace(row, 1.0); !s.ok()) return s;
    double signal = 0.0;
    for (size_t j = 0; j < p; ++j) signal += row[j] * options.theta_star[j];
    const double value = signal + options.noise_sd * noise.NextGaussian();
    out.y[i] = options.task == Task::kRegression
                   ? options.label_scale * value
                   : (value >= 0.0 ? 1.0 : -1.0);
  }
  for (size_t j = 0; j < p; ++j) {
    out.feature_names.push_back(absl::StrCat("x", j));
    out.blocks.push_back({absl::StrCat("x", j), j, 1, {}});
  }
  out.x_bound = 1.0;
  out.y_bound = std::max(MaxAbs(out.y), 1e-300);
  return out;
}

}  // namespace dpboost
