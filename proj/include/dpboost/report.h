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

// Ratio-CDF curves and on-disk reports.
//
// Layout of a report directory:
//   results.csv     dataset,algorithm,epsilon,delta,tau,rounds,seed,
//                   metric_name,metric_value,wall_ms (one row per metric)
//   results.jsonl   one JSON object per run
//   failures.csv    runs that errored, with the message
//   manifest.json   config echo, code version, kernel ISA
//   curves/*.csv    candidate,baseline,metric,ratio,cumulative_count

#ifndef DPBOOST_REPORT_H_
#define DPBOOST_REPORT_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpboost/experiment.h"
#include "nlohmann/json_fwd.hpp"

namespace dpboost {

inline constexpr char kCodeVersion[] = "0.1.0";

struct CurvePoint {
  double ratio = 0.0;
  size_t cumulative_count = 0;
};

struct RatioCdfCurve {
  std::string candidate;
  std::string baseline;
  std::string metric;
  double epsilon = 0.0;
  // Grid coordinates of the compared runs; "best" under oracle selection.
  std::string tau;
  std::string rounds;
  // Per-dataset ratios in dataset order, then the empirical CDF over them.
  std::vector<std::pair<std::string, double>> dataset_ratios;
  std::vector<CurvePoint> points;
};

// Per dataset, the median over seeds of `metric` for candidate and baseline,
// and ratio = candidate / baseline for lower-is-better metrics and
// baseline / candidate otherwise, so a ratio below 1 always favors the
// candidate. A zero denominator yields +inf (or 1 when both are 0). Every
// candidate run must have a baseline run with the same dataset and seed.
absl::StatusOr<RatioCdfCurve> RatioCdf(const std::vector<RunResult>& candidate,
                                       const std::vector<RunResult>& baseline,
                                       absl::string_view metric);

// Empirical CDF of `ratios`: one point per distinct value, counts cumulative.
std::vector<CurvePoint> EmpiricalCdf(std::vector<double> ratios);

struct CurveOptions {
  std::string candidate = kAlgoBoosted;
  std::string baseline = kAlgoAdassp;
  // Picks, per dataset, algorithm and epsilon, the (tau, rounds) cell with the
  // best seed-median before comparing. This looks at test metrics of every
  // cell, so it is a non-private analysis.
  bool oracle_best = false;
};

// All curves for the (epsilon, tau, rounds, metric) cells present in
// `results`, or one per (epsilon, metric) under oracle selection. Returns an
// empty list when either algorithm is absent.
absl::StatusOr<std::vector<RatioCdfCurve>> BuildCurves(
    const std::vector<RunResult>& results, const CurveOptions& options);

// Writes the report directory. Existing files are overwritten.
absl::Status EmitReport(const ExperimentResults& results,
                        const std::vector<RatioCdfCurve>& curves,
                        const nlohmann::json& config_echo, double delta,
                        const std::string& out_dir);

// Writes only the curve files (used by the `report` subcommand).
absl::Status WriteCurves(const std::vector<RatioCdfCurve>& curves,
                         const std::string& out_dir);

// Reads results.csv back into runs (metrics regrouped per key).
absl::StatusOr<std::vector<RunResult>> ReadResultsCsv(const std::string& path);

// Range checks on every row: mse >= 0, scores in [0, 1], all finite.
absl::Status CheckMetricSanity(const std::vector<RunResult>& results);

}  // namespace dpboost

#endif  // DPBOOST_REPORT_H_
