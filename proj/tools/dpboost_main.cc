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

// Command-line entry point:
//   dpboost fit    --config <file> [--algorithm ...] [--epsilon ...] ...
//   dpboost bench  --config <file> --out <dir> [--seed N] [--threads N] [--fail-fast]
//   dpboost theory [--out <dir>] [--seed N] [--trials N]
//   dpboost report --results <dir> [--out <dir>] [--oracle-best]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpboost/boosting.h"
#include "dpboost/data_io.h"
#include "dpboost/experiment.h"
#include "dpboost/report.h"
#include "dpboost/theory.h"
#include "nlohmann/json.hpp"

namespace dpboost {
namespace {

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 1;
}

struct FitFlags {
  std::string config;
  std::string algorithm = kAlgoBoosted;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<int> rounds;
  std::optional<uint64_t> seed;
};

int RunFit(const FitFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = LoadExperimentConfig(flags.config);
  if (!config.ok()) return Fail(config.status());
  const DatasetSpec& spec = config->datasets.front();
  absl::StatusOr<EncodedDataset> data =
      spec.synthetic.has_value()
          ? MakeSyntheticDataset(*spec.synthetic)
          : [&]() -> absl::StatusOr<EncodedDataset> {
              absl::StatusOr<RawTable> table = LoadCsv(spec.path, spec.schema);
              if (!table.ok()) return table.status();
              return OneHotEncode(*table, spec.schema);
            }();
  if (!data.ok()) return Fail(data.status());

  const double epsilon = flags.epsilon.value_or(config->epsilons.front());
  const double tau = flags.tau.value_or(config->taus.front());
  const int rounds = flags.rounds.value_or(config->rounds_grid.front());
  const uint64_t seed = flags.seed.value_or(config->seeds.front());
  const RunKey key{spec.name, flags.algorithm, epsilon, tau, rounds, seed};

  const bool clip_labels = flags.algorithm == kAlgoAdassp;
  absl::StatusOr<EncodedDataset> prepared =
      Preprocess(*data, config->x_clip, tau, clip_labels);
  if (!prepared.ok()) return Fail(prepared.status());
  absl::StatusOr<PrivacyBudget> budget =
      PrivacyBudget::FromEpsilonDelta(epsilon, config->delta);
  if (!budget.ok()) return Fail(budget.status());
  const NoiseDraw noise{seed, key.StreamLabel()};

  LinearModel model;
  std::vector<PrivacyLedger::Entry> releases;
  double composed = 0.0;
  if (flags.algorithm == kAlgoAdassp) {
    absl::StatusOr<BudgetSplit> split = SplitBudget(budget->mu_total(), config->split);
    if (!split.ok()) return Fail(split.status());
    absl::StatusOr<FitResult> fit =
        AdasspFit(*prepared, *budget, *split, noise, config->lambda_rule);
    if (!fit.ok()) return Fail(fit.status());
    model = fit->model;
    releases = fit->ledger.entries();
    composed = fit->ledger.Composed();
  } else if (flags.algorithm == kAlgoBoosted) {
    BoostConfig bc;
    bc.rounds = rounds;
    bc.tau = tau;
    bc.x_clip = config->x_clip;
    bc.split = config->split;
    bc.lambda_rule = config->lambda_rule;
    absl::StatusOr<BoostResult> fit = BoostedAdasspFit(*prepared, *budget, bc, noise);
    if (!fit.ok()) return Fail(fit.status());
    model = fit->model;
    releases = fit->ledger.entries();
    composed = fit->ledger.Composed();
  } else {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("fit supports adassp and boosted_adassp, got ", flags.algorithm)));
  }

  nlohmann::ordered_json out;
  out["dataset"] = spec.name;
  out["algorithm"] = flags.algorithm;
  out["epsilon"] = epsilon;
  out["delta"] = config->delta;
  out["mu_total"] = budget->mu_total();
  out["mu_composed"] = composed;
  out["tau"] = tau;
  out["rounds"] = rounds;
  out["seed"] = seed;
  nlohmann::ordered_json theta = nlohmann::ordered_json::object();
  for (size_t j = 0; j < model.theta.size(); ++j) {
    const std::string name =
        j < prepared->feature_names.size() ? prepared->feature_names[j]
                                           : absl::StrCat("x", j);
    theta[name] = model.theta[j];
  }
  out["theta"] = std::move(theta);
  out["releases"] = nlohmann::ordered_json::array();
  for (const PrivacyLedger::Entry& e : releases) {
    out["releases"].push_back(
        {{"label", e.label}, {"mu", e.mu}, {"sensitivity", e.sensitivity}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct BenchFlags {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  bool fail_fast = false;
};

int RunBench(const BenchFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = LoadExperimentConfig(flags.config);
  if (!config.ok()) return Fail(config.status());
  if (flags.seed.has_value()) config->seeds = {*flags.seed};
  if (flags.threads.has_value()) config->threads = *flags.threads;
  if (flags.fail_fast) config->fail_fast = true;
  if (absl::Status s = config->Validate(); !s.ok()) return Fail(s);

  absl::StatusOr<ExperimentResults> results = RunExperiment(*config);
  if (!results.ok()) return Fail(results.status());
  absl::StatusOr<std::vector<RatioCdfCurve>> curves =
      BuildCurves(results->results, CurveOptions{});
  if (!curves.ok()) return Fail(curves.status());
  // Thread count and fail-fast do not change results; keep them out of the
  // echo so reports compare equal across machines.
  nlohmann::json echo = config->ToJson();
  echo.erase("threads");
  if (absl::Status s =
          EmitReport(*results, *curves, echo, config->delta, flags.out);
      !s.ok()) {
    return Fail(s);
  }
  std::cout << absl::StrFormat("%d runs, %d failures, %d curves -> %s\n",
                               results->results.size(), results->failures.size(),
                               curves->size(), flags.out);
  return 0;
}

struct TheoryFlags {
  std::string out;
  uint64_t seed = 0;
  int trials = 10000;
};

int RunTheory(const TheoryFlags& flags) {
  TheorySuiteOptions options;
  options.seed = flags.seed;
  options.separation_trials = flags.trials;
  absl::StatusOr<std::vector<TheoryCheck>> checks = RunTheorySuite(options);
  if (!checks.ok()) return Fail(checks.status());

  std::string csv = "claim_id,grid_point,bound,observed,pass\n";
  int failures = 0;
  for (const TheoryCheck& c : *checks) {
    absl::StrAppend(&csv, c.claim_id, ",", c.grid_point, ",",
                    absl::StrFormat("%.12g", c.bound), ",",
                    absl::StrFormat("%.12g", c.observed), ",",
                    c.pass ? "pass" : "FAIL", "\n");
    failures += c.pass ? 0 : 1;
  }
  if (flags.out.empty()) {
    std::cout << csv;
  } else {
    std::filesystem::create_directories(flags.out);
    const std::string path = (std::filesystem::path(flags.out) / "theory.csv").string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << csv;
    if (!f) return Fail(absl::UnavailableError(absl::StrCat("cannot write ", path)));
  }
  std::cerr << absl::StrFormat("%d checks, %d failed\n", checks->size(), failures);
  return failures == 0 ? 0 : 2;
}

struct ReportFlags {
  std::string results;
  std::string out;
  std::string candidate = kAlgoBoosted;
  std::string baseline = kAlgoAdassp;
  bool oracle_best = false;
};

int RunReport(const ReportFlags& flags) {
  const std::string csv =
      (std::filesystem::path(flags.results) / "results.csv").string();
  absl::StatusOr<std::vector<RunResult>> results = ReadResultsCsv(csv);
  if (!results.ok()) return Fail(results.status());
  CurveOptions options;
  options.candidate = flags.candidate;
  options.baseline = flags.baseline;
  options.oracle_best = flags.oracle_best;
  absl::StatusOr<std::vector<RatioCdfCurve>> curves = BuildCurves(*results, options);
  if (!curves.ok()) return Fail(curves.status());
  const std::string out = flags.out.empty() ? flags.results : flags.out;
  if (absl::Status s = WriteCurves(*curves, out); !s.ok()) return Fail(s);
  for (const RatioCdfCurve& c : *curves) {
    size_t wins = 0;
    for (const auto& [dataset, ratio] : c.dataset_ratios) wins += ratio < 1.0 ? 1 : 0;
    std::cout << absl::StrFormat(
        "%s vs %s  %-6s eps=%g tau=%s T=%s: candidate better on %d/%d datasets\n",
        c.candidate, c.baseline, c.metric, c.epsilon, c.tau, c.rounds, wins,
        c.dataset_ratios.size());
  }
  return 0;
}

}  // namespace
}  // namespace dpboost

int main(int argc, char** argv) {
  using namespace dpboost;
  CLI::App app{"Differentially private boosted linear regression"};
  app.require_subcommand(1);

  FitFlags fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one model and print theta");
  fit_cmd->add_option("--config", fit.config, "Experiment config (JSON)")->required();
  fit_cmd->add_option("--algorithm", fit.algorithm, "adassp | boosted_adassp");
  fit_cmd->add_option("--epsilon", fit.epsilon);
  fit_cmd->add_option("--tau", fit.tau);
  fit_cmd->add_option("--rounds", fit.rounds);
  fit_cmd->add_option("--seed", fit.seed);

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run the experiment grid");
  bench_cmd->add_option("--config", bench.config, "Experiment config (JSON)")
      ->required();
  bench_cmd->add_option("--out", bench.out, "Report directory")->required();
  bench_cmd->add_option("--seed", bench.seed, "Run a single seed");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads");
  bench_cmd->add_flag("--fail-fast", bench.fail_fast, "Stop at the first failed run");

  TheoryFlags theory;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "Check the mean-estimation bounds numerically");
  theory_cmd->add_option("--out", theory.out, "Write theory.csv here instead of stdout");
  theory_cmd->add_option("--seed", theory.seed);
  theory_cmd->add_option("--trials", theory.trials, "Monte-Carlo trials");

  ReportFlags report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Rebuild ratio curves from stored results");
  report_cmd->add_option("--results", report.results, "Report directory to read")
      ->required();
  report_cmd->add_option("--out", report.out, "Where to write curves (default: same)");
  report_cmd->add_option("--candidate", report.candidate);
  report_cmd->add_option("--baseline", report.baseline);
  report_cmd->add_flag("--oracle-best", report.oracle_best,
                       "Compare each algorithm at its best (tau, T); non-private");

  CLI11_PARSE(app, argc, argv);
  if (*fit_cmd) return RunFit(fit);
  if (*bench_cmd) return RunBench(bench);
  if (*theory_cmd) return RunTheory(theory);
  if (*report_cmd) return RunReport(report);
  return 1;
}
