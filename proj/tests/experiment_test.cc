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

#include "dpboost/experiment.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "testing/status_matchers.h"

namespace dpboost {
namespace {

using ::dpboost::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

const std::string kFixtureDir = DPBOOST_FIXTURE_DIR;

ExperimentConfig SyntheticConfig() {
  ExperimentConfig c;
  DatasetSpec d;
  d.name = "synthetic";
  SyntheticOptions s;
  s.n = 800;
  s.theta_star = {1.0, -1.0};
  s.label_scale = 10.0;
  s.seed = 11;
  d.synthetic = s;
  c.datasets = {d};
  c.epsilons = {1.0};
  c.taus = {1.0};
  c.rounds_grid = {3};
  c.seeds = {0, 1};
  c.algorithms = {kAlgoAdassp, kAlgoBoosted};
  return c;
}

TEST(ExperimentConfigTest, ParsesFixture) {
  ASSERT_OK_AND_ASSIGN(ExperimentConfig c,
                       LoadExperimentConfig(kFixtureDir + "/bench_fixture.json"));
  ASSERT_EQ(c.datasets.size(), 3u);
  EXPECT_EQ(c.datasets[0].name, "housing_small");
  EXPECT_EQ(c.datasets[0].schema.label, "price");
  EXPECT_TRUE(std::filesystem::exists(c.datasets[0].path));
  EXPECT_EQ(c.datasets[1].schema.task, Task::kClassification);
  EXPECT_EQ(c.datasets[1].schema.positive_class, "approved");
  ASSERT_TRUE(c.datasets[2].synthetic.has_value());
  EXPECT_EQ(c.datasets[2].synthetic->n, 600);
  EXPECT_THAT(c.epsilons, ElementsAre(1.0, 10.0));
  EXPECT_THAT(c.rounds_grid, ElementsAre(1, 5));
  EXPECT_EQ(c.lambda_rule, LambdaRule::kAdaptiveFloor);
  EXPECT_EQ(c.threads, 2);
  EXPECT_OK(c.Validate());
  EXPECT_EQ(GridSize(c), 3u * 2 * 1 * 2 * 3 * 2);
}

TEST(ExperimentConfigTest, JsonRoundTrip) {
  ASSERT_OK_AND_ASSIGN(ExperimentConfig c,
                       LoadExperimentConfig(kFixtureDir + "/bench_fixture.json"));
  ASSERT_OK_AND_ASSIGN(ExperimentConfig again,
                       ExperimentConfig::FromJson(c.ToJson(), kFixtureDir));
  EXPECT_EQ(again.ToJson().dump(), c.ToJson().dump());
}

TEST(ExperimentConfigTest, RejectsBadValues) {
  ExperimentConfig c = SyntheticConfig();
  c.taus = {0.0};
  EXPECT_THAT(c.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  c = SyntheticConfig();
  c.algorithms = {"lasso"};
  EXPECT_THAT(c.Validate(),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("lasso")));
  c = SyntheticConfig();
  c.rounds_grid = {};
  EXPECT_THAT(c.Validate(), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ExperimentConfig::FromJson(nlohmann::json::parse(R"({"epsilons": "x"})"),
                                         kFixtureDir),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ExperimentConfigTest, LambdaRuleNamesRoundTrip) {
  for (LambdaRule r : {LambdaRule::kAdaptiveFloor, LambdaRule::kNoisyMinEigenvalue,
                       LambdaRule::kZero}) {
    ASSERT_OK_AND_ASSIGN(LambdaRule parsed, ParseLambdaRule(LambdaRuleName(r)));
    EXPECT_EQ(parsed, r);
  }
  EXPECT_THAT(ParseLambdaRule("sometimes"),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ExperimentTest, GridCardinality) {
  ExperimentConfig c = SyntheticConfig();
  EXPECT_EQ(GridSize(c), 4u);
  ASSERT_OK_AND_ASSIGN(ExperimentResults r, RunExperiment(c));
  EXPECT_TRUE(r.failures.empty());
  ASSERT_EQ(r.results.size(), 4u);
  for (size_t i = 1; i < r.results.size(); ++i) {
    EXPECT_TRUE(r.results[i - 1].key < r.results[i].key);
  }
  for (const RunResult& run : r.results) {
    ASSERT_EQ(run.metrics.size(), 1u);
    EXPECT_EQ(run.metrics[0].first, "mse");
    EXPECT_EQ(run.wall_ms, 0.0);
  }
}

TEST(ExperimentTest, ResultsIndependentOfThreadCount) {
  ExperimentConfig c = SyntheticConfig();
  c.seeds = {0, 1, 2, 3};
  c.epsilons = {0.5, 2.0};
  c.threads = 1;
  ASSERT_OK_AND_ASSIGN(ExperimentResults one, RunExperiment(c));
  c.threads = 4;
  ASSERT_OK_AND_ASSIGN(ExperimentResults four, RunExperiment(c));
  ASSERT_EQ(one.results.size(), four.results.size());
  for (size_t i = 0; i < one.results.size(); ++i) {
    EXPECT_EQ(one.results[i].key, four.results[i].key);
    EXPECT_EQ(one.results[i].metrics, four.results[i].metrics);
  }
}

TEST(ExperimentTest, StreamLabelSeparatesCells) {
  RunKey a{"d", kAlgoBoosted, 1.0, 1.0, 5, 0};
  RunKey b = a;
  b.rounds = 6;
  RunKey c = a;
  c.tau = 2.0;
  EXPECT_NE(a.StreamLabel(), b.StreamLabel());
  EXPECT_NE(a.StreamLabel(), c.StreamLabel());
  EXPECT_EQ(a.StreamLabel(), RunKey(a).StreamLabel());
}

TEST(ExperimentTest, MetricsForTask) {
  EXPECT_THAT(MetricsForTask(Task::kRegression), ElementsAre("mse"));
  EXPECT_THAT(MetricsForTask(Task::kClassification),
              ElementsAre("f1", "auroc", "auprc"));
}

// Two identical feature columns make the unregularized gram singular, so the
// ols runs fail while the private ones (lambda > 0) succeed.
class CollinearDatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = (std::filesystem::path(::testing::TempDir()) / "collinear.csv").string();
    std::ofstream out(path_);
    out << "a,b,y\n";
    for (int i = 0; i < 60; ++i) {
      const double a = (i % 7) / 7.0 - 0.4;
      out << a << "," << a << "," << 2 * a << "\n";
    }
  }

  ExperimentConfig Config() const {
    ExperimentConfig c;
    DatasetSpec d;
    d.name = "collinear";
    d.path = path_;
    d.schema.columns = {{"a", ColumnKind::kNumeric, {}},
                        {"b", ColumnKind::kNumeric, {}},
                        {"y", ColumnKind::kNumeric, {}}};
    d.schema.label = "y";
    c.datasets = {d};
    c.epsilons = {1.0};
    c.taus = {1.0};
    c.rounds_grid = {1};
    c.seeds = {0, 1};
    c.algorithms = {kAlgoAdassp, kAlgoOls};
    return c;
  }

  std::string path_;
};

TEST_F(CollinearDatasetTest, FailSoftCollectsFailures) {
  ASSERT_OK_AND_ASSIGN(ExperimentResults r, RunExperiment(Config()));
  ASSERT_EQ(r.results.size(), 2u);
  ASSERT_EQ(r.failures.size(), 2u);
  for (const RunResult& run : r.results) EXPECT_EQ(run.key.algorithm, kAlgoAdassp);
  for (const RunFailure& f : r.failures) {
    EXPECT_EQ(f.key.algorithm, kAlgoOls);
    EXPECT_FALSE(f.error.empty());
  }
}

TEST_F(CollinearDatasetTest, FailFastReturnsError) {
  ExperimentConfig c = Config();
  c.fail_fast = true;
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kFailedPrecondition,
                                         HasSubstr("seed=0")));
}

TEST(ExperimentTest, MissingFileFailsEveryCell) {
  ExperimentConfig c = SyntheticConfig();
  c.datasets[0].synthetic.reset();
  c.datasets[0].path = "/nonexistent/data.csv";
  c.datasets[0].schema.columns = {{"x", ColumnKind::kNumeric, {}},
                                  {"y", ColumnKind::kNumeric, {}}};
  c.datasets[0].schema.label = "y";
  ASSERT_OK_AND_ASSIGN(ExperimentResults r, RunExperiment(c));
  EXPECT_TRUE(r.results.empty());
  EXPECT_EQ(r.failures.size(), GridSize(c));
  c.fail_fast = true;
  EXPECT_THAT(RunExperiment(c), StatusIs(absl::StatusCode::kNotFound,
                                         HasSubstr("synthetic")));
}

// At a generous budget with labels that never clip, boosting should be close
// to plain least squares.
TEST(ExperimentTest, BoostedNearOlsAtLargeBudget) {
  ExperimentConfig c = SyntheticConfig();
  c.datasets[0].synthetic->n = 5000;
  c.datasets[0].synthetic->label_scale = 1.0;
  c.epsilons = {10.0};
  c.taus = {10.0};
  c.rounds_grid = {10};
  c.seeds = {0, 1, 2};
  c.algorithms = {kAlgoBoosted, kAlgoOls};
  ASSERT_OK_AND_ASSIGN(ExperimentResults r, RunExperiment(c));
  ASSERT_TRUE(r.failures.empty());
  for (uint64_t seed : c.seeds) {
    double boosted = -1, ols = -1;
    for (const RunResult& run : r.results) {
      if (run.key.seed != seed) continue;
      (run.key.algorithm == kAlgoOls ? ols : boosted) = run.metrics[0].second;
    }
    ASSERT_GT(ols, 0.0);
    EXPECT_LT(boosted, 2.0 * ols) << "seed " << seed;
  }
}

}  // namespace
}  // namespace dpboost
