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
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "dpboost/matrix.h"
#include "dpboost/regression.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "testing/status_matchers.h"

namespace dpboost {
namespace {

using ::dpboost::testing::StatusIs;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

Schema NumericSchema() {
  Schema s;
  s.columns = {{"a", ColumnKind::kNumeric, {}},
               {"b", ColumnKind::kNumeric, {}},
               {"y", ColumnKind::kNumeric, {}}};
  s.label = "y";
  return s;
}

Schema MixedSchema() {
  Schema s;
  s.columns = {{"color", ColumnKind::kCategorical, {"red", "green", "blue"}},
               {"size", ColumnKind::kNumeric, {}},
               {"label", ColumnKind::kCategorical, {"no", "yes"}}};
  s.label = "label";
  s.task = Task::kClassification;
  s.positive_class = "yes";
  return s;
}

TEST(ParseCsvRecordsTest, QuotingAndLineEnds) {
  ASSERT_OK_AND_ASSIGN(auto records,
                       ParseCsvRecords("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\n\n3,4"));
  ASSERT_EQ(records.size(), 3u);
  EXPECT_THAT(records[0], ElementsAre("a", "b"));
  EXPECT_THAT(records[1], ElementsAre("x,1", "say \"hi\""));
  EXPECT_THAT(records[2], ElementsAre("3", "4"));
  EXPECT_THAT(ParseCsvRecords("a,\"b\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("unterminated")));
  EXPECT_THAT(ParseCsvRecords("a,b\"c\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("quote")));
}

TEST(ParseCsvTest, TwoNumericRows) {
  ASSERT_OK_AND_ASSIGN(RawTable t, ParseCsv("a,b,y\n1,2,3\n4,5,6\n", NumericSchema()));
  EXPECT_EQ(t.row_count, 2u);
  EXPECT_THAT(t.columns[0].numeric, ElementsAre(1, 4));
  EXPECT_THAT(t.columns[2].numeric, ElementsAre(3, 6));
}

TEST(ParseCsvTest, HeaderOrderMayDifferFromSchema) {
  ASSERT_OK_AND_ASSIGN(RawTable t, ParseCsv("y,b,a\n3,2,1\n", NumericSchema()));
  EXPECT_EQ(t.columns[0].name, "a");
  EXPECT_THAT(t.columns[0].numeric, ElementsAre(1));
  EXPECT_THAT(t.columns[2].numeric, ElementsAre(3));
}

TEST(ParseCsvTest, ErrorsNameRowAndColumn) {
  EXPECT_THAT(ParseCsv("color,size,label\nred,1,no\nz,2,yes\n", MixedSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("row 2, column 'color': unknown category 'z'")));
  EXPECT_THAT(ParseCsv("a,b,y\n1,,3\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument,
                       HasSubstr("row 1, column 'b': missing value")));
  EXPECT_THAT(ParseCsv("a,b,y\n1,abc,3\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("'abc'")));
  EXPECT_THAT(ParseCsv("a,b,y\n1,inf,3\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("finite")));
  EXPECT_THAT(ParseCsv("a,b,y\n1,2\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("fields")));
  EXPECT_THAT(ParseCsv("a,b,y\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("no rows")));
  EXPECT_THAT(ParseCsv("a,c,y\n1,2,3\n", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("'c'")));
  EXPECT_THAT(ParseCsv("", NumericSchema()),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SchemaTest, ValidateRejectsInconsistentSchemas) {
  EXPECT_OK(NumericSchema().Validate());
  EXPECT_OK(MixedSchema().Validate());
  Schema s = NumericSchema();
  s.label = "missing";
  EXPECT_THAT(s.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  s = MixedSchema();
  s.positive_class = "maybe";
  EXPECT_THAT(s.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  s = MixedSchema();
  s.task = Task::kRegression;
  EXPECT_THAT(s.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  s = NumericSchema();
  s.columns.push_back({"a", ColumnKind::kNumeric, {}});
  EXPECT_THAT(s.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SchemaTest, JsonRoundTrip) {
  const Schema s = MixedSchema();
  ASSERT_OK_AND_ASSIGN(Schema back, Schema::FromJson(s.ToJson()));
  EXPECT_EQ(back.ToJson(), s.ToJson());
  EXPECT_EQ(back.columns[0].categories, s.columns[0].categories);
  EXPECT_EQ(back.task, Task::kClassification);
  EXPECT_THAT(Schema::FromJson(nlohmann::json::parse(R"({"columns": 3})")),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(OneHotEncodeTest, CategoricalBlockAndBinaryLabels) {
  ASSERT_OK_AND_ASSIGN(
      RawTable t, ParseCsv("color,size,label\nred,0.5,no\nblue,2,yes\ngreen,0,yes\n",
                           MixedSchema()));
  ASSERT_OK_AND_ASSIGN(EncodedDataset d, OneHotEncode(t, MixedSchema()));
  EXPECT_THAT(d.feature_names,
              ElementsAre("color=red", "color=green", "color=blue", "size"));
  EXPECT_EQ(d.x, Matrix::FromRows({{1, 0, 0, 0.5}, {0, 0, 1, 2}, {0, 1, 0, 0}}));
  EXPECT_THAT(d.y, ElementsAre(-1, 1, 1));
  EXPECT_EQ(d.y_bound, 1.0);
  EXPECT_NEAR(d.x_bound, std::sqrt(5.0), 1e-15);
  EXPECT_OK(d.Validate());
}

TEST(OneHotEncodeTest, TwoCategoryIndicatorExample) {
  Schema s;
  s.columns = {{"c", ColumnKind::kCategorical, {"a", "b"}},
               {"y", ColumnKind::kNumeric, {}}};
  s.label = "y";
  ASSERT_OK_AND_ASSIGN(RawTable t, ParseCsv("c,y\na,1\nb,2\n", s));
  ASSERT_OK_AND_ASSIGN(EncodedDataset d, OneHotEncode(t, s));
  EXPECT_EQ(d.x, Matrix::FromRows({{1, 0}, {0, 1}}));
}

TEST(OneHotEncodeTest, NumericPassThroughAndIntercept) {
  Schema s = NumericSchema();
  ASSERT_OK_AND_ASSIGN(RawTable t, ParseCsv("a,b,y\n1,2,3\n-4,5,6\n", s));
  ASSERT_OK_AND_ASSIGN(EncodedDataset d, OneHotEncode(t, s));
  EXPECT_EQ(d.x, Matrix::FromRows({{1, 2}, {-4, 5}}));
  EXPECT_THAT(d.y, ElementsAre(3, 6));
  s.add_intercept = true;
  ASSERT_OK_AND_ASSIGN(EncodedDataset di, OneHotEncode(t, s));
  EXPECT_EQ(di.x, Matrix::FromRows({{1, 2, 1}, {-4, 5, 1}}));
  EXPECT_EQ(di.feature_names.back(), "intercept");
}

TEST(OneHotEncodeTest, DecodeRoundTrip) {
  const std::string csv =
      "label,size,color\nno,1,blue\nyes,2,blue\nno,3,red\nyes,4,green\n";
  ASSERT_OK_AND_ASSIGN(RawTable t, ParseCsv(csv, MixedSchema()));
  ASSERT_OK_AND_ASSIGN(EncodedDataset d, OneHotEncode(t, MixedSchema()));
  ASSERT_OK_AND_ASSIGN(std::vector<std::string> colors,
                       DecodeCategorical(d, "color"));
  EXPECT_THAT(colors, ElementsAre("blue", "blue", "red", "green"));
  EXPECT_THAT(DecodeCategorical(d, "size"), StatusIs(absl::StatusCode::kNotFound));
  // Every encoded row has exactly one active indicator per categorical block.
  for (size_t r = 0; r < d.n(); ++r) {
    double active = 0;
    for (size_t j = 0; j < 3; ++j) active += d.x(r, j);
    EXPECT_EQ(active, 1.0);
  }
}

TEST(LoadCsvTest, ReadsFilesAndReportsMissingOnes) {
  const std::string path = ::testing::TempDir() + "/data_io_test.csv";
  {
    std::ofstream out(path);
    out << "a,b,y\n1,2,3\n";
  }
  ASSERT_OK_AND_ASSIGN(RawTable t, LoadCsv(path, NumericSchema()));
  EXPECT_EQ(t.row_count, 1u);
  EXPECT_THAT(LoadCsv(path + ".missing", NumericSchema()),
              StatusIs(absl::StatusCode::kNotFound));
}

EncodedDataset Sequential(size_t n) {
  EncodedDataset d;
  d.x = Matrix(n, 1);
  d.y.resize(n);
  for (size_t i = 0; i < n; ++i) {
    d.x(i, 0) = static_cast<double>(i);
    d.y[i] = static_cast<double>(i);
  }
  d.x_bound = static_cast<double>(n);
  d.y_bound = static_cast<double>(n);
  return d;
}

TEST(TrainTestSplitTest, SizesDisjointAndDeterministic) {
  ASSERT_OK_AND_ASSIGN(DataSplit s, TrainTestSplit(Sequential(10), 0.2, 5));
  EXPECT_EQ(s.train.n(), 8u);
  EXPECT_EQ(s.test.n(), 2u);
  std::vector<size_t> all = s.train_indices;
  all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
  std::sort(all.begin(), all.end());
  for (size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(s.test_indices.begin(), s.test_indices.end()));
  for (size_t k = 0; k < s.test.n(); ++k) {
    EXPECT_EQ(s.test.y[k], static_cast<double>(s.test_indices[k]));
  }

  ASSERT_OK_AND_ASSIGN(DataSplit again, TrainTestSplit(Sequential(10), 0.2, 5));
  EXPECT_EQ(again.test_indices, s.test_indices);

  ASSERT_OK_AND_ASSIGN(DataSplit half, TrainTestSplit(Sequential(4), 0.5, 1));
  EXPECT_EQ(half.train.n(), 2u);
  EXPECT_EQ(half.test.n(), 2u);

  EXPECT_THAT(TrainTestSplit(Sequential(10), 0.0, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(TrainTestSplit(Sequential(3), 0.01, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(TrainTestSplitTest, SeedsVaryTheSplit) {
  std::vector<std::vector<size_t>> seen;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    ASSERT_OK_AND_ASSIGN(DataSplit s, TrainTestSplit(Sequential(50), 0.2, seed));
    seen.push_back(s.test_indices);
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::unique(seen.begin(), seen.end()), seen.end());
}

std::vector<double> RowOf(const Matrix& m, size_t r) {
  return {m.row(r).begin(), m.row(r).end()};
}

TEST(PreprocessTest, ClipsRowsAndOptionallyLabels) {
  EncodedDataset d;
  d.x = Matrix::FromRows({{3, 4}, {0.3, 0.4}, {0, 0.5}});
  d.y = {-5, 0.2, 12};
  d.x_bound = 5;
  d.y_bound = 12;
  ASSERT_OK_AND_ASSIGN(EncodedDataset clipped, Preprocess(d, 1.0, 1.0, true));
  EXPECT_THAT(RowOf(clipped.x, 0),
              ElementsAre(DoubleNear(0.6, 1e-15), DoubleNear(0.8, 1e-15)));
  EXPECT_THAT(RowOf(clipped.x, 1), ElementsAre(0.3, 0.4));
  EXPECT_THAT(clipped.y, ElementsAre(-1, 0.2, 1));
  EXPECT_EQ(clipped.x_bound, 1.0);
  EXPECT_EQ(clipped.y_bound, 1.0);
  EXPECT_OK(clipped.Validate());

  ASSERT_OK_AND_ASSIGN(EncodedDataset raw_labels, Preprocess(d, 1.0, 1.0, false));
  EXPECT_THAT(raw_labels.y, ElementsAre(-5, 0.2, 12));
  EXPECT_EQ(raw_labels.y_bound, 12.0);
  EXPECT_OK(raw_labels.Validate());

  EXPECT_THAT(Preprocess(d, 0.0, 1.0, true),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SyntheticTest, DeterministicAndBounded) {
  SyntheticOptions o;
  o.n = 500;
  o.theta_star = {1, -1, 2};
  o.label_scale = 100;
  o.seed = 4;
  ASSERT_OK_AND_ASSIGN(EncodedDataset a, MakeSyntheticDataset(o));
  ASSERT_OK_AND_ASSIGN(EncodedDataset b, MakeSyntheticDataset(o));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_LE(MaxRowNorm(a.x), 1.0);
  EXPECT_OK(a.Validate());
  o.task = Task::kClassification;
  ASSERT_OK_AND_ASSIGN(EncodedDataset c, MakeSyntheticDataset(o));
  for (double y : c.y) EXPECT_TRUE(y == 1.0 || y == -1.0);
  o.n = 0;
  EXPECT_THAT(MakeSyntheticDataset(o), StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace dpboost
