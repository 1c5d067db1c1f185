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

#include "dpboost/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "dpboost/data_io.h"
#include "dpboost/kernels.h"
#include "dpboost/metrics.h"
#include "nlohmann/json.hpp"

namespace dpboost {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr char kResultsHeader[] =
    "dataset,algorithm,epsilon,delta,tau,rounds,seed,metric_name,metric_value,"
    "wall_ms";

// Shortest representation that parses back to the same double.
std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string CsvField(absl::string_view s) {
  if (s.find_first_of(",\"\r\n") == absl::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> MetricValue(const RunResult& r, absl::string_view metric) {
  for (const auto& [name, value] : r.metrics) {
    if (name == metric) return value;
  }
  return std::nullopt;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double OrientedRatio(double candidate, double baseline, absl::string_view metric) {
  double num = candidate;
  double den = baseline;
  if (!LowerIsBetter(metric)) std::swap(num, den);
  if (den == 0.0) {
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

absl::Status WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  out << contents;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("error writing ", path.string()));
  return absl::OkStatus();
}

std::string CurveFileName(const RatioCdfCurve& c) {
  return absl::StrCat(c.candidate, "_vs_", c.baseline, "_", c.metric, "_eps",
                      Num(c.epsilon), "_tau", c.tau, "_T", c.rounds, ".csv");
}

}  // namespace

std::vector<CurvePoint> EmpiricalCdf(std::vector<double> ratios) {
  std::sort(ratios.begin(), ratios.end());
  std::vector<CurvePoint> points;
  for (size_t i = 0; i < ratios.size(); ++i) {
    if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) continue;
    points.push_back({ratios[i], i + 1});
  }
  return points;
}

absl::StatusOr<RatioCdfCurve> RatioCdf(const std::vector<RunResult>& candidate,
                                       const std::vector<RunResult>& baseline,
                                       absl::string_view metric) {
  std::map<std::string, std::vector<double>> cand_values;
  std::map<std::pair<std::string, uint64_t>, double> base_by_seed;
  std::map<std::string, std::vector<double>> base_values;
  for (const RunResult& r : baseline) {
    std::optional<double> v = MetricValue(r, metric);
    if (!v.has_value()) continue;
    base_by_seed[{r.key.dataset, r.key.seed}] = *v;
    base_values[r.key.dataset].push_back(*v);
  }
  RatioCdfCurve curve;
  curve.metric = std::string(metric);
  for (const RunResult& r : candidate) {
    std::optional<double> v = MetricValue(r, metric);
    if (!v.has_value()) continue;
    if (!base_by_seed.contains({r.key.dataset, r.key.seed})) {
      return absl::NotFoundError(absl::StrCat(
          "no baseline run for dataset ", r.key.dataset, ", seed ", r.key.seed));
    }
    cand_values[r.key.dataset].push_back(*v);
    if (curve.candidate.empty()) {
      curve.candidate = r.key.algorithm;
      curve.epsilon = r.key.epsilon;
      curve.tau = Num(r.key.tau);
      curve.rounds = absl::StrCat(r.key.rounds);
    }
  }
  for (const auto& [dataset, values] : base_values) {
    if (!cand_values.contains(dataset)) {
      return absl::NotFoundError(
          absl::StrCat("no candidate run for dataset ", dataset));
    }
  }
  if (!baseline.empty()) curve.baseline = baseline.front().key.algorithm;
  std::vector<double> ratios;
  for (const auto& [dataset, values] : cand_values) {
    const double ratio =
        OrientedRatio(Median(values), Median(base_values[dataset]), metric);
    curve.dataset_ratios.emplace_back(dataset, ratio);
    ratios.push_back(ratio);
  }
  curve.points = EmpiricalCdf(std::move(ratios));
  return curve;
}

absl::StatusOr<std::vector<RatioCdfCurve>> BuildCurves(
    const std::vector<RunResult>& results, const CurveOptions& options) {
  std::vector<RatioCdfCurve> curves;
  std::set<std::string> metrics;
  bool has_candidate = false, has_baseline = false;
  for (const RunResult& r : results) {
    has_candidate |= r.key.algorithm == options.candidate;
    has_baseline |= r.key.algorithm == options.baseline;
    for (const auto& m : r.metrics) metrics.insert(m.first);
  }
  if (!has_candidate || !has_baseline) return curves;

  if (!options.oracle_best) {
    using Cell = std::tuple<double, double, int>;
    std::map<Cell, std::pair<std::vector<RunResult>, std::vector<RunResult>>> cells;
    for (const RunResult& r : results) {
      const Cell cell{r.key.epsilon, r.key.tau, r.key.rounds};
      if (r.key.algorithm == options.candidate) cells[cell].first.push_back(r);
      if (r.key.algorithm == options.baseline) cells[cell].second.push_back(r);
    }
    for (const auto& [cell, runs] : cells) {
      if (runs.first.empty() || runs.second.empty()) continue;
      for (const std::string& metric : metrics) {
        absl::StatusOr<RatioCdfCurve> c = RatioCdf(runs.first, runs.second, metric);
        if (!c.ok()) return c.status();
        if (c->points.empty()) continue;
        c->candidate = options.candidate;
        c->baseline = options.baseline;
        curves.push_back(*std::move(c));
      }
    }
    return curves;
  }

  // Oracle selection: best seed-median over (tau, rounds) per algorithm.
  using Group = std::tuple<std::string, std::string, double>;  // algo, dataset, eps
  using Cell = std::pair<double, int>;
  std::map<std::string, std::map<Group, std::map<Cell, std::vector<double>>>> values;
  for (const RunResult& r : results) {
    if (r.key.algorithm != options.candidate && r.key.algorithm != options.baseline) {
      continue;
    }
    for (const auto& [metric, v] : r.metrics) {
      values[metric][{r.key.algorithm, r.key.dataset, r.key.epsilon}]
            [{r.key.tau, r.key.rounds}]
                .push_back(v);
    }
  }
  for (const auto& [metric, groups] : values) {
    std::map<std::pair<double, std::string>, std::pair<double, double>> best;
    std::map<std::pair<double, std::string>, int> seen;
    for (const auto& [group, cells] : groups) {
      const auto& [algo, dataset, eps] = group;
      double pick = LowerIsBetter(metric) ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
      for (const auto& [cell, vs] : cells) {
        const double m = Median(vs);
        pick = LowerIsBetter(metric) ? std::min(pick, m) : std::max(pick, m);
      }
      auto& slot = best[{eps, dataset}];
      if (algo == options.candidate) {
        slot.first = pick;
        seen[{eps, dataset}] |= 1;
      } else {
        slot.second = pick;
        seen[{eps, dataset}] |= 2;
      }
    }
    std::map<double, RatioCdfCurve> by_eps;
    for (const auto& [k, pair] : best) {
      if (seen[k] != 3) {
        return absl::NotFoundError(absl::StrCat(
            "dataset ", k.second, " lacks runs for one of the compared algorithms"));
      }
      RatioCdfCurve& c = by_eps[k.first];
      c.candidate = options.candidate;
      c.baseline = options.baseline;
      c.metric = metric;
      c.epsilon = k.first;
      c.tau = "best";
      c.rounds = "best";
      c.dataset_ratios.emplace_back(k.second,
                                    OrientedRatio(pair.first, pair.second, metric));
    }
    for (auto& [eps, c] : by_eps) {
      std::vector<double> ratios;
      for (const auto& dr : c.dataset_ratios) ratios.push_back(dr.second);
      c.points = EmpiricalCdf(std::move(ratios));
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

absl::Status WriteCurves(const std::vector<RatioCdfCurve>& curves,
                         const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / "curves";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  // Drop curve files from earlier runs so the directory reflects this report.
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".csv") fs::remove(entry.path(), ec);
  }
  for (const RatioCdfCurve& c : curves) {
    std::string body = "candidate,baseline,metric,ratio,cumulative_count\n";
    for (const CurvePoint& p : c.points) {
      absl::StrAppend(&body, CsvField(c.candidate), ",", CsvField(c.baseline), ",",
                      CsvField(c.metric), ",", Num(p.ratio), ",",
                      p.cumulative_count, "\n");
    }
    if (absl::Status s = WriteFile(dir / CurveFileName(c), body); !s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status EmitReport(const ExperimentResults& results,
                        const std::vector<RatioCdfCurve>& curves,
                        const nlohmann::json& config_echo, double delta,
                        const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", out_dir, ": ", ec.message()));
  }
  const fs::path dir(out_dir);

  std::string csv = absl::StrCat(kResultsHeader, "\n");
  std::string jsonl;
  for (const RunResult& r : results.results) {
    const RunKey& k = r.key;
    for (const auto& [name, value] : r.metrics) {
      absl::StrAppend(&csv, CsvField(k.dataset), ",", CsvField(k.algorithm), ",",
                      Num(k.epsilon), ",", Num(delta), ",", Num(k.tau), ",",
                      k.rounds, ",", k.seed, ",", CsvField(name), ",", Num(value),
                      ",", Num(r.wall_ms), "\n");
    }
    ordered_json line = {{"dataset", k.dataset},   {"algorithm", k.algorithm},
                         {"epsilon", k.epsilon},   {"delta", delta},
                         {"tau", k.tau},           {"rounds", k.rounds},
                         {"seed", k.seed},         {"metrics", ordered_json::object()},
                         {"wall_ms", r.wall_ms}};
    for (const auto& [name, value] : r.metrics) line["metrics"][name] = value;
    absl::StrAppend(&jsonl, line.dump(), "\n");
  }
  if (absl::Status s = WriteFile(dir / "results.csv", csv); !s.ok()) return s;
  if (absl::Status s = WriteFile(dir / "results.jsonl", jsonl); !s.ok()) return s;

  std::string failures = "dataset,algorithm,epsilon,tau,rounds,seed,error\n";
  for (const RunFailure& f : results.failures) {
    const RunKey& k = f.key;
    absl::StrAppend(&failures, CsvField(k.dataset), ",", CsvField(k.algorithm), ",",
                    Num(k.epsilon), ",", Num(k.tau), ",", k.rounds, ",", k.seed, ",",
                    CsvField(f.error), "\n");
  }
  if (absl::Status s = WriteFile(dir / "failures.csv", failures); !s.ok()) return s;

  ordered_json manifest = {
      {"code_version", kCodeVersion},
      {"kernel_isa", std::string(kernels::IsaName(kernels::Active().isa))},
      {"result_count", results.results.size()},
      {"failure_count", results.failures.size()},
      {"curve_count", curves.size()},
      {"config", ordered_json::parse(config_echo.dump())}};
  if (absl::Status s = WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  return WriteCurves(curves, out_dir);
}

absl::StatusOr<std::vector<RunResult>> ReadResultsCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  absl::StatusOr<std::vector<std::vector<std::string>>> records =
      ParseCsvRecords(buf.str());
  if (!records.ok()) return records.status();
  if (records->empty() || absl::StrJoin((*records)[0], ",") != kResultsHeader) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": unexpected header, want ", kResultsHeader));
  }
  std::vector<RunResult> out;
  std::map<RunKey, size_t> index;
  for (size_t i = 1; i < records->size(); ++i) {
    const std::vector<std::string>& f = (*records)[i];
    RunKey key;
    double delta, value, wall;
    int rounds;
    uint64_t seed;
    if (f.size() != 10 || !absl::SimpleAtod(f[2], &key.epsilon) ||
        !absl::SimpleAtod(f[3], &delta) || !absl::SimpleAtod(f[4], &key.tau) ||
        !absl::SimpleAtoi(f[5], &rounds) || !absl::SimpleAtoi(f[6], &seed) ||
        !absl::SimpleAtod(f[8], &value) || !absl::SimpleAtod(f[9], &wall)) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": malformed row ", i));
    }
    key.dataset = f[0];
    key.algorithm = f[1];
    key.rounds = rounds;
    key.seed = seed;
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) out.push_back({key, {}, wall});
    out[it->second].metrics.emplace_back(f[7], value);
  }
  return out;
}

absl::Status CheckMetricSanity(const std::vector<RunResult>& results) {
  for (const RunResult& r : results) {
    for (const auto& [name, value] : r.metrics) {
      const bool ok = std::isfinite(value) &&
                      (name == "mse" ? value >= 0.0 : value >= 0.0 && value <= 1.0);
      if (!ok) {
        return absl::InternalError(absl::StrCat(
            r.key.StreamLabel(), "/seed=", r.key.seed, ": ", name, "=", value,
            " is out of range"));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace dpboost
