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

// Grid runner: every (dataset, algorithm, epsilon, tau, rounds, seed) cell is
// an independent task whose noise streams are keyed by the cell, so results
// do not depend on scheduling or thread count.

#ifndef DPBOOST_EXPERIMENT_H_
#define DPBOOST_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpboost/data_io.h"
#include "dpboost/privacy.h"
#include "dpboost/regression.h"
#include "nlohmann/json_fwd.hpp"

namespace dpboost {

inline constexpr char kAlgoAdassp[] = "adassp";
inline constexpr char kAlgoBoosted[] = "boosted_adassp";
// Non-private least squares on the same split, for reference only.
inline constexpr char kAlgoOls[] = "ols";

// Either a CSV file with its schema, or a synthetic generator.
struct DatasetSpec {
  std::string name;
  std::string path;
  Schema schema;
  std::optional<SyntheticOptions> synthetic;
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<double> epsilons;
  double delta = 1e-6;
  std::vector<double> taus;
  std::vector<int> rounds_grid;
  std::vector<uint64_t> seeds;
  std::vector<std::string> algorithms;
  SplitRatio split;
  double x_clip = 1.0;
  double test_fraction = 0.2;
  LambdaRule lambda_rule = LambdaRule::kAdaptiveFloor;
  // Wall time is nondeterministic; it is reported as 0 unless enabled.
  bool record_timing = false;
  int threads = 1;
  bool fail_fast = false;

  absl::Status Validate() const;

  // Relative dataset and schema paths are resolved against `base_dir`.
  static absl::StatusOr<ExperimentConfig> FromJson(const nlohmann::json& json,
                                                   const std::string& base_dir);
  nlohmann::json ToJson() const;
};

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

absl::string_view LambdaRuleName(LambdaRule rule);
absl::StatusOr<LambdaRule> ParseLambdaRule(absl::string_view name);

struct RunKey {
  std::string dataset;
  std::string algorithm;
  double epsilon = 0.0;
  double tau = 0.0;
  int rounds = 1;
  uint64_t seed = 0;

  auto Tie() const {
    return std::tie(dataset, algorithm, epsilon, tau, rounds, seed);
  }
  bool operator<(const RunKey& o) const { return Tie() < o.Tie(); }
  bool operator==(const RunKey& o) const { return Tie() == o.Tie(); }

  // Stream label for the run's noise.
  std::string StreamLabel() const;
};

struct RunResult {
  RunKey key;
  std::vector<std::pair<std::string, double>> metrics;  // fixed metric order
  double wall_ms = 0.0;
};

struct RunFailure {
  RunKey key;
  std::string error;
};

struct ExperimentResults {
  std::vector<RunResult> results;    // sorted by key
  std::vector<RunFailure> failures;  // sorted by key
};

// Metrics reported for a task: {"mse"} or {"f1", "auroc", "auprc"}.
std::vector<std::string> MetricsForTask(Task task);

// Train/evaluate one cell on an already loaded dataset.
absl::StatusOr<RunResult> RunOne(const ExperimentConfig& config,
                                 const EncodedDataset& data, Task task,
                                 const RunKey& key);

// Loads datasets, expands the grid and runs it on config.threads workers.
// Per-run errors are collected as failures unless config.fail_fast is set, in
// which case the first failure (by key) is returned as the error.
absl::StatusOr<ExperimentResults> RunExperiment(const ExperimentConfig& config);

// Number of cells in the grid.
size_t GridSize(const ExperimentConfig& config);

}  // namespace dpboost

#endif  // DPBOOST_EXPERIMENT_H_
