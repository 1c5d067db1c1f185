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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "dpboost/boosting.h"
#include "dpboost/metrics.h"
#include "nlohmann/json.hpp"

namespace dpboost {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

absl::StatusOr<SyntheticOptions> SyntheticFromJson(const json& j) {
  SyntheticOptions o;
  o.n = j.value("n", o.n);
  if (j.contains("theta_star")) {
    o.theta_star = j.at("theta_star").get<std::vector<double>>();
  }
  o.feature_sd = j.value("feature_sd", o.feature_sd);
  o.noise_sd = j.value("noise_sd", o.noise_sd);
  o.label_scale = j.value("label_scale", o.label_scale);
  o.seed = j.value("seed", o.seed);
  const std::string task = j.value("task", std::string("regression"));
  if (task == "regression") {
    o.task = Task::kRegression;
  } else if (task == "classification") {
    o.task = Task::kClassification;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown task '", task, "'"));
  }
  return o;
}

json SyntheticToJson(const SyntheticOptions& o) {
  return {{"n", o.n},
          {"theta_star", o.theta_star},
          {"feature_sd", o.feature_sd},
          {"noise_sd", o.noise_sd},
          {"label_scale", o.label_scale},
          {"task", std::string(TaskName(o.task))},
          {"seed", o.seed}};
}

struct LoadedDataset {
  absl::StatusOr<EncodedDataset> data;
  Task task = Task::kRegression;
};

LoadedDataset LoadDataset(const DatasetSpec& spec) {
  if (spec.synthetic.has_value()) {
    return {MakeSyntheticDataset(*spec.synthetic), spec.synthetic->task};
  }
  absl::StatusOr<RawTable> table = LoadCsv(spec.path, spec.schema);
  if (!table.ok()) return {table.status(), spec.schema.task};
  return {OneHotEncode(*table, spec.schema), spec.schema.task};
}

uint64_t SplitSeed(const RunKey& key) {
  return StreamKey(NoiseDraw{key.seed, absl::StrCat("split/", key.dataset)});
}

}  // namespace

absl::string_view LambdaRuleName(LambdaRule rule) {
  switch (rule) {
    case LambdaRule::kAdaptiveFloor:
      return "adaptive_floor";
    case LambdaRule::kNoisyMinEigenvalue:
      return "noisy_min_eigenvalue";
    case LambdaRule::kZero:
      return "zero";
  }
  return "unknown";
}

absl::StatusOr<LambdaRule> ParseLambdaRule(absl::string_view name) {
  for (LambdaRule r : {LambdaRule::kAdaptiveFloor, LambdaRule::kNoisyMinEigenvalue,
                       LambdaRule::kZero}) {
    if (LambdaRuleName(r) == name) return r;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown lambda rule '", name, "'"));
}

absl::Status ExperimentConfig::Validate() const {
  if (datasets.empty() || epsilons.empty() || taus.empty() ||
      rounds_grid.empty() || seeds.empty() || algorithms.empty()) {
    return absl::InvalidArgumentError("every grid in the config must be non-empty");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must be in (0, 1)");
  }
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return absl::InvalidArgumentError("epsilons must be positive");
    }
  }
  for (double t : taus) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      return absl::InvalidArgumentError("taus must be positive");
    }
  }
  for (int t : rounds_grid) {
    if (t < 1) return absl::InvalidArgumentError("rounds must be >= 1");
  }
  for (const std::string& a : algorithms) {
    if (a != kAlgoAdassp && a != kAlgoBoosted && a != kAlgoOls) {
      return absl::InvalidArgumentError(absl::StrCat("unknown algorithm '", a, "'"));
    }
  }
  std::set<std::string> names;
  for (const DatasetSpec& d : datasets) {
    if (d.name.empty() || !names.insert(d.name).second) {
      return absl::InvalidArgumentError("dataset names must be unique and non-empty");
    }
  }
  if (!(x_clip > 0.0) || !(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("x_clip must be > 0, test_fraction in (0, 1)");
  }
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (absl::StatusOr<BudgetSplit> s = SplitBudget(1.0, split); !s.ok()) {
    return s.status();
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ExperimentConfig::FromJson(
    const json& j, const std::string& base_dir) {
  try {
    ExperimentConfig c;
    for (const json& d : j.at("datasets")) {
      DatasetSpec spec;
      spec.name = d.at("name").get<std::string>();
      if (d.contains("synthetic")) {
        absl::StatusOr<SyntheticOptions> s = SyntheticFromJson(d.at("synthetic"));
        if (!s.ok()) return s.status();
        spec.synthetic = *s;
      } else {
        spec.path = Resolve(base_dir, d.at("path").get<std::string>());
        const json& schema = d.at("schema");
        absl::StatusOr<Schema> parsed =
            schema.is_string()
                ? LoadSchema(Resolve(base_dir, schema.get<std::string>()))
                : Schema::FromJson(schema);
        if (!parsed.ok()) {
          return absl::Status(parsed.status().code(),
                              absl::StrCat("dataset ", spec.name, ": ",
                                           parsed.status().message()));
        }
        spec.schema = *std::move(parsed);
      }
      c.datasets.push_back(std::move(spec));
    }
    c.epsilons = j.at("epsilons").get<std::vector<double>>();
    c.delta = j.value("delta", c.delta);
    c.taus = j.at("taus").get<std::vector<double>>();
    c.rounds_grid = j.at("rounds_grid").get<std::vector<int>>();
    c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("split")) {
      const json& s = j.at("split");
      c.split = {s.value("a", 1.0), s.value("b", 1.0), s.value("c", 1.0)};
    }
    c.x_clip = j.value("x_clip", c.x_clip);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    if (j.contains("lambda_rule")) {
      absl::StatusOr<LambdaRule> r =
          ParseLambdaRule(j.at("lambda_rule").get<std::string>());
      if (!r.ok()) return r.status();
      c.lambda_rule = *r;
    }
    c.record_timing = j.value("record_timing", c.record_timing);
    c.threads = j.value("threads", c.threads);
    c.fail_fast = j.value("fail_fast", c.fail_fast);
    if (absl::Status s = c.Validate(); !s.ok()) return s;
    return c;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed config: ", e.what()));
  }
}

json ExperimentConfig::ToJson() const {
  json ds = json::array();
  for (const DatasetSpec& d : datasets) {
    json entry = {{"name", d.name}};
    if (d.synthetic.has_value()) {
      entry["synthetic"] = SyntheticToJson(*d.synthetic);
    } else {
      entry["path"] = d.path;
      entry["schema"] = d.schema.ToJson();
    }
    ds.push_back(std::move(entry));
  }
  return {{"datasets", std::move(ds)},
          {"epsilons", epsilons},
          {"delta", delta},
          {"taus", taus},
          {"rounds_grid", rounds_grid},
          {"seeds", seeds},
          {"algorithms", algorithms},
          {"split", {{"a", split.a}, {"b", split.b}, {"c", split.c}}},
          {"x_clip", x_clip},
          {"test_fraction", test_fraction},
          {"lambda_rule", std::string(LambdaRuleName(lambda_rule))},
          {"record_timing", record_timing},
          {"threads", threads},
          {"fail_fast", fail_fast}};
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  return ExperimentConfig::FromJson(j, fs::path(path).parent_path().string());
}

std::string RunKey::StreamLabel() const {
  return absl::StrFormat("run/%s/%s/eps=%.17g/tau=%.17g/T=%d", dataset, algorithm,
                         epsilon, tau, rounds);
}

std::vector<std::string> MetricsForTask(Task task) {
  if (task == Task::kRegression) return {"mse"};
  return {"f1", "auroc", "auprc"};
}

absl::StatusOr<RunResult> RunOne(const ExperimentConfig& config,
                                 const EncodedDataset& data, Task task,
                                 const RunKey& key) {
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<DataSplit> split =
      TrainTestSplit(data, config.test_fraction, SplitSeed(key));
  if (!split.ok()) return split.status();

  const bool clip_labels = key.algorithm == kAlgoAdassp;
  absl::StatusOr<EncodedDataset> train =
      Preprocess(split->train, config.x_clip, key.tau, clip_labels);
  if (!train.ok()) return train.status();
  absl::StatusOr<EncodedDataset> test =
      Preprocess(split->test, config.x_clip, key.tau, /*clip_labels=*/false);
  if (!test.ok()) return test.status();

  LinearModel model;
  if (key.algorithm == kAlgoOls) {
    absl::StatusOr<Matrix> gram = ComputeGram(train->x);
    if (!gram.ok()) return gram.status();
    absl::StatusOr<Vector> cross = ComputeCross(train->x, train->y);
    if (!cross.ok()) return cross.status();
    absl::StatusOr<LinearModel> ols = RidgeSolve(*gram, 0.0, *cross);
    if (!ols.ok()) return ols.status();
    model = *std::move(ols);
  } else {
    absl::StatusOr<PrivacyBudget> budget =
        PrivacyBudget::FromEpsilonDelta(key.epsilon, config.delta);
    if (!budget.ok()) return budget.status();
    const NoiseDraw noise{key.seed, key.StreamLabel()};
    if (key.algorithm == kAlgoAdassp) {
      absl::StatusOr<BudgetSplit> bs = SplitBudget(budget->mu_total(), config.split);
      if (!bs.ok()) return bs.status();
      absl::StatusOr<FitResult> fit =
          AdasspFit(*train, *budget, *bs, noise, config.lambda_rule);
      if (!fit.ok()) return fit.status();
      model = std::move(fit->model);
    } else if (key.algorithm == kAlgoBoosted) {
      BoostConfig bc;
      bc.rounds = key.rounds;
      bc.tau = key.tau;
      bc.x_clip = config.x_clip;
      bc.split = config.split;
      bc.lambda_rule = config.lambda_rule;
      absl::StatusOr<BoostResult> fit = BoostedAdasspFit(*train, *budget, bc, noise);
      if (!fit.ok()) return fit.status();
      model = std::move(fit->model);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown algorithm '", key.algorithm, "'"));
    }
  }

  absl::StatusOr<Vector> scores = Predict(test->x, model);
  if (!scores.ok()) return scores.status();
  RunResult result;
  result.key = key;
  for (const std::string& name : MetricsForTask(task)) {
    absl::StatusOr<double> value = ComputeMetric(name, test->y, *scores);
    if (!value.ok()) {
      return absl::Status(value.status().code(),
                          absl::StrCat(name, ": ", value.status().message()));
    }
    if (!std::isfinite(*value)) {
      return absl::InternalError(absl::StrCat(name, " is not finite"));
    }
    result.metrics.emplace_back(name, *value);
  }
  if (config.record_timing) {
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return result;
}

size_t GridSize(const ExperimentConfig& config) {
  return config.datasets.size() * config.algorithms.size() *
         config.epsilons.size() * config.taus.size() *
         config.rounds_grid.size() * config.seeds.size();
}

absl::StatusOr<ExperimentResults> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;

  std::vector<LoadedDataset> loaded;
  loaded.reserve(config.datasets.size());
  for (const DatasetSpec& spec : config.datasets) {
    loaded.push_back(LoadDataset(spec));
    if (config.fail_fast && !loaded.back().data.ok()) {
      return absl::Status(loaded.back().data.status().code(),
                          absl::StrCat("dataset ", spec.name, ": ",
                                       loaded.back().data.status().message()));
    }
  }

  struct GridCell {
    size_t dataset;
    RunKey key;
  };
  std::vector<GridCell> tasks;
  tasks.reserve(GridSize(config));
  for (size_t d = 0; d < config.datasets.size(); ++d) {
    for (const std::string& algo : config.algorithms) {
      for (double eps : config.epsilons) {
        for (double tau : config.taus) {
          for (int rounds : config.rounds_grid) {
            for (uint64_t seed : config.seeds) {
              tasks.push_back(
                  {d, RunKey{config.datasets[d].name, algo, eps, tau, rounds, seed}});
            }
          }
        }
      }
    }
  }

  std::vector<absl::StatusOr<RunResult>> outcomes(
      tasks.size(), absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      if (stop.load()) break;
      const LoadedDataset& ds = loaded[tasks[i].dataset];
      if (!ds.data.ok()) {
        outcomes[i] = ds.data.status();
      } else {
        outcomes[i] = RunOne(config, *ds.data, ds.task, tasks[i].key);
      }
      if (!outcomes[i].ok() && config.fail_fast) stop.store(true);
    }
  };
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(config.threads), std::max<size_t>(1, tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  ExperimentResults out;
  std::vector<size_t> order(tasks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return tasks[a].key < tasks[b].key; });
  for (size_t i : order) {
    if (outcomes[i].ok()) {
      out.results.push_back(*std::move(outcomes[i]));
      continue;
    }
    // With fail-fast, cells skipped after the stop are not failures.
    if (config.fail_fast && outcomes[i].status().code() == absl::StatusCode::kUnknown &&
        outcomes[i].status().message() == "not run") {
      continue;
    }
    if (config.fail_fast) {
      return absl::Status(outcomes[i].status().code(),
                          absl::StrCat(tasks[i].key.StreamLabel(), "/seed=",
                                       tasks[i].key.seed, ": ",
                                       outcomes[i].status().message()));
    }
    out.failures.push_back(
        {tasks[i].key, std::string(outcomes[i].status().message())});
  }
  return out;
}

}  // namespace dpboost
