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

#include "dpboost/theory.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpboost/kernels.h"
#include "dpboost/privacy.h"

namespace dpboost {
namespace {

absl::Status CheckTau(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    return absl::InvalidArgumentError(absl::StrCat("tau must be > 0, got ", tau));
  }
  return absl::OkStatus();
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

absl::StatusOr<double> ExpectedClippedMean(double m, double tau) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!std::isfinite(m)) {
    return absl::InvalidArgumentError("shift must be finite");
  }
  // Evaluate at |m| so the result is exactly odd in m.
  if (m < 0.0) {
    absl::StatusOr<double> mirrored = ExpectedClippedMean(-m, tau);
    if (!mirrored.ok()) return mirrored.status();
    return -*mirrored;
  }
  const double lo = -tau - m;
  const double hi = tau - m;
  // Mass clipped to +tau is Phi(-hi) = 1 - Phi(hi); the complement form keeps
  // precision when hi is large.
  const double upper_mass = NormalCdf(-hi);
  const double lower_mass = NormalCdf(lo);
  const double middle_mass = NormalCdf(hi) - NormalCdf(lo);
  return -tau * lower_mass + tau * upper_mass + m * middle_mass -
         (NormalPdf(hi) - NormalPdf(lo));
}

absl::StatusOr<BiasTrace> MeanBoostingTrace(const MeanProblem& problem,
                                            int rounds) {
  if (absl::Status s = CheckTau(problem.tau); !s.ok()) return s;
  if (!std::isfinite(problem.mu_true)) {
    return absl::InvalidArgumentError("mean must be finite");
  }
  if (rounds < 0) {
    return absl::InvalidArgumentError("rounds must be >= 0");
  }
  BiasTrace trace;
  trace.biases.reserve(rounds + 1);
  double mu_hat = 0.0;
  trace.biases.push_back(mu_hat - problem.mu_true);
  for (int t = 0; t < rounds; ++t) {
    absl::StatusOr<double> step =
        ExpectedClippedMean(problem.mu_true - mu_hat, problem.tau);
    if (!step.ok()) return step.status();
    mu_hat += *step;
    trace.biases.push_back(mu_hat - problem.mu_true);
  }
  return trace;
}

double SmallBiasContraction(double tau) { return 1.5 - NormalCdf(tau); }

double LargeBiasDecrement(double tau) {
  return (NormalCdf(2.0 * tau) - 0.5) * tau;
}

absl::StatusOr<double> RoundsBound(double mu, double tau, double alpha) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    return absl::InvalidArgumentError(absl::StrCat("alpha must be > 0, got ", alpha));
  }
  if (!std::isfinite(mu)) return absl::InvalidArgumentError("mean must be finite");
  const double linear = std::max(0.0, std::abs(mu) - tau) / LargeBiasDecrement(tau);
  const double geometric =
      std::log(tau / alpha) / std::log(1.0 / SmallBiasContraction(tau));
  return std::max(0.0, linear + geometric);
}

absl::StatusOr<double> OneRoundBiasLowerBound(double mu, double tau) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!std::isfinite(mu)) return absl::InvalidArgumentError("mean must be finite");
  const double a = std::abs(mu);
  return 0.5 * a * (NormalCdf(tau + 2.0 * a) - NormalCdf(-tau));
}

absl::StatusOr<double> HuberObjective(std::span<const double> samples,
                                      double tau, double mu) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!std::isfinite(mu) || !AllFinite(samples)) {
    return absl::InvalidArgumentError("Huber objective needs finite inputs");
  }
  CompensatedSum total;
  for (double y : samples) {
    const double r = std::abs(mu - y);
    total.Add(r <= tau ? 0.5 * r * r : tau * r - 0.5 * tau * tau);
  }
  return total.value();
}

absl::StatusOr<double> HuberFixedPoint(std::span<const double> samples,
                                       double tau, int max_iter, double tol) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  if (!AllFinite(samples)) {
    return absl::InvalidArgumentError("samples must be finite");
  }
  if (max_iter < 1 || !(tol > 0.0)) {
    return absl::InvalidArgumentError("need max_iter >= 1 and tol > 0");
  }
  const kernels::KernelTable& k = kernels::Active();
  const double n = static_cast<double>(samples.size());
  double mu_hat = 0.0;
  double update = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    update = k.clipped_sum(samples.data(), samples.size(), mu_hat, tau) / n;
    if (std::abs(update) <= tol) return mu_hat;
    mu_hat += update;
  }
  return absl::DeadlineExceededError(absl::StrCat(
      "Huber iteration did not converge in ", max_iter,
      " iterations; last update ", update));
}

Vector ContaminatedSample::Values() const {
  Vector out = inlier_values;
  out.insert(out.end(), static_cast<size_t>(outlier_count), outlier_value);
  return out;
}

absl::StatusOr<ContaminatedSample> MakeContaminatedSample(
    double mu, double sigma, double outlier_value, int outlier_count, int n,
    const NoiseDraw& noise) {
  if (n < 1 || outlier_count < 0 || outlier_count >= n) {
    return absl::InvalidArgumentError("need 0 <= outlier_count < n");
  }
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0 ||
      !std::isfinite(outlier_value)) {
    return absl::InvalidArgumentError("sample parameters must be finite");
  }
  ContaminatedSample sample;
  sample.outlier_value = outlier_value;
  sample.outlier_count = outlier_count;
  NoiseStream stream(noise);
  sample.inlier_values.reserve(n - outlier_count);
  for (int i = 0; i < n - outlier_count; ++i) {
    sample.inlier_values.push_back(mu + sigma * (2.0 * stream.NextUniform() - 1.0));
  }
  return sample;
}

absl::StatusOr<FiniteSampleResult> FiniteSampleMeanMse(
    const FiniteSampleOptions& options, const NoiseDraw& noise) {
  const MeanDistribution& dist = options.dist;
  if (options.tau_schedule.empty()) {
    return absl::InvalidArgumentError("empty clipping schedule");
  }
  for (double tau : options.tau_schedule) {
    if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  }
  if (options.n < 1 || options.trials < 2) {
    return absl::InvalidArgumentError("need n >= 1 and trials >= 2");
  }
  if (!(options.rho > 0.0) || options.rho >= options.n) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 0 < rho < n, got rho=", options.rho));
  }
  if (!(options.bound > 0.0) || !std::isfinite(dist.mu) ||
      !std::isfinite(dist.sigma) || dist.sigma < 0.0 ||
      std::abs(dist.mu) + dist.sigma > options.bound) {
    return absl::InvalidArgumentError("distribution support exceeds [-B, B]");
  }

  const kernels::KernelTable& k = kernels::Active();
  const size_t n = static_cast<size_t>(options.n);
  const double releases = static_cast<double>(options.tau_schedule.size() + 1);
  const double unit_sd = std::sqrt(releases / options.rho);
  const bool point_mass = dist.kind == MeanDistribution::Kind::kPointMass;

  Vector values(point_mass ? 0 : n);
  CompensatedSum sum_sq;
  CompensatedSum sum_fourth;
  for (int trial = 0; trial < options.trials; ++trial) {
    NoiseStream stream(noise.Substream(absl::StrCat("trial/", trial)));
    double mean = dist.mu;
    if (!point_mass) {
      CompensatedSum s;
      for (double& v : values) {
        v = dist.mu + dist.sigma * (2.0 * stream.NextUniform() - 1.0);
        s.Add(v);
      }
      mean = s.value() / static_cast<double>(n);
    }
    const double denom =
        std::max(1.0, static_cast<double>(n) + unit_sd * stream.NextGaussian());
    double mu_hat = 0.0;
    for (double tau : options.tau_schedule) {
      double clipped;
      if (point_mass) {
        clipped = static_cast<double>(n) * std::clamp(dist.mu - mu_hat, -tau, tau);
      } else {
        clipped = k.clipped_sum(values.data(), n, mu_hat, tau);
      }
      mu_hat += (clipped + tau * unit_sd * stream.NextGaussian()) / denom;
    }
    const double err2 = (mu_hat - mean) * (mu_hat - mean);
    sum_sq.Add(err2);
    sum_fourth.Add(err2 * err2);
  }
  const double t = static_cast<double>(options.trials);
  FiniteSampleResult result;
  result.mse = sum_sq.value() / t;
  const double var = std::max(0.0, sum_fourth.value() / t - result.mse * result.mse);
  result.standard_error = std::sqrt(var * t / (t - 1.0) / t);
  return result;
}

absl::StatusOr<std::vector<double>> TwoStageSchedule(double bound, int n,
                                                     double rho, double sigma,
                                                     double c) {
  if (!(bound > 0.0) || n < 2 || !(rho > 0.0) || sigma < 0.0 || !(c > 0.0)) {
    return absl::InvalidArgumentError("invalid two-stage schedule parameters");
  }
  const double scale =
      std::max(bound / (static_cast<double>(n) * std::sqrt(rho)), sigma);
  return std::vector<double>{bound,
                             scale * std::sqrt(c * std::log(static_cast<double>(n)))};
}

namespace {

constexpr int kTraceRounds = 400;
constexpr double kExactTolerance = 1e-9;

std::string GridPoint(double mu, double tau) {
  return absl::StrFormat("mu=%g;tau=%g", mu, tau);
}

}  // namespace

absl::StatusOr<std::vector<TheoryCheck>> RunTheorySuite(
    const TheorySuiteOptions& options) {
  const std::vector<double> mus = {-10, -5, -2, -1, -0.5, -0.1,
                                   0.1, 0.5, 1, 2, 5, 10};
  const std::vector<double> taus = {0.25, 0.5, 1, 2};
  std::vector<TheoryCheck> out;

  for (double mu : mus) {
    for (double tau : taus) {
      absl::StatusOr<BiasTrace> trace =
          MeanBoostingTrace({mu, tau, 0.0}, kTraceRounds);
      if (!trace.ok()) return trace.status();
      const std::vector<double>& b = trace->biases;

      // Contraction inside the clipping radius.
      const double factor = SmallBiasContraction(tau);
      double worst_ratio = 0.0;
      bool small_ok = true;
      // Constant decrement outside it.
      const double decrement = LargeBiasDecrement(tau);
      double worst_decrement = std::numeric_limits<double>::infinity();
      bool large_ok = true;
      bool monotone_ok = true;
      double worst_growth = -std::numeric_limits<double>::infinity();
      for (size_t t = 0; t + 1 < b.size(); ++t) {
        const double now = std::abs(b[t]);
        const double next = std::abs(b[t + 1]);
        if (now <= tau) {
          if (next > factor * now + kExactTolerance) small_ok = false;
          if (now > 1e-12) worst_ratio = std::max(worst_ratio, next / now);
        } else {
          if (next > now - decrement + kExactTolerance) large_ok = false;
          worst_decrement = std::min(worst_decrement, now - next);
        }
        if (next > now + 1e-12) monotone_ok = false;
        worst_growth = std::max(worst_growth, next - now);
      }
      out.push_back({"small_bias_contraction", GridPoint(mu, tau), factor,
                     worst_ratio, small_ok});
      if (std::isfinite(worst_decrement)) {
        out.push_back({"large_bias_decrement", GridPoint(mu, tau), decrement,
                       worst_decrement, large_ok});
      }
      out.push_back({"monotone_bias", GridPoint(mu, tau), 0.0, worst_growth,
                     monotone_ok});

      for (double alpha : {0.1, 0.01}) {
        absl::StatusOr<double> bound = RoundsBound(mu, tau, alpha);
        if (!bound.ok()) return bound.status();
        const double allowed = std::ceil(*bound);
        double reached = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < b.size(); ++t) {
          if (std::abs(b[t]) <= alpha) {
            reached = static_cast<double>(t);
            break;
          }
        }
        out.push_back({"rounds_to_accuracy",
                       absl::StrFormat("%s;alpha=%g", GridPoint(mu, tau), alpha),
                       allowed, reached, reached <= allowed});
      }

      absl::StatusOr<double> floor = OneRoundBiasLowerBound(mu, tau);
      if (!floor.ok()) return floor.status();
      const double observed = std::abs(b[1]);
      out.push_back({"one_round_bias_floor", GridPoint(mu, tau), *floor,
                     observed, observed >= *floor - kExactTolerance});
    }
  }

  {
    constexpr double kBound = 10.0;
    constexpr int kN = 10000;
    constexpr double kRho = 1.0;
    FiniteSampleOptions base;
    base.dist = {MeanDistribution::Kind::kPointMass, kBound, 0.0};
    base.bound = kBound;
    base.n = kN;
    base.rho = kRho;
    base.trials = options.separation_trials;
    FiniteSampleOptions one_stage = base;
    one_stage.tau_schedule = {1.0};
    absl::StatusOr<std::vector<double>> two = TwoStageSchedule(kBound, kN, kRho, 0.0);
    if (!two.ok()) return two.status();
    FiniteSampleOptions two_stage = base;
    two_stage.tau_schedule = *two;
    const NoiseDraw noise{options.seed, "theory/separation"};
    absl::StatusOr<FiniteSampleResult> r1 =
        FiniteSampleMeanMse(one_stage, noise.Substream("one_stage"));
    if (!r1.ok()) return r1.status();
    absl::StatusOr<FiniteSampleResult> r2 =
        FiniteSampleMeanMse(two_stage, noise.Substream("two_stage"));
    if (!r2.ok()) return r2.status();
    const double ratio = r2->mse / r1->mse;
    out.push_back({"two_stage_separation",
                   absl::StrFormat("B=%g;n=%d;rho=%g", kBound, kN, kRho), 0.5,
                   ratio, ratio < 0.5});
  }

  {
    const std::vector<double> samples = {0.0, 0.0, 10.0};
    absl::StatusOr<double> fp = HuberFixedPoint(samples, 1.0, 100000, 1e-12);
    if (!fp.ok()) return fp.status();
    out.push_back({"huber_fixed_point", "samples={0,0,10};tau=1", 0.5, *fp,
                   std::abs(*fp - 0.5) <= 1e-6});
  }
  {
    const std::vector<double> samples = {0.0, 0.0, 0.0, 10.0};
    absl::StatusOr<double> fp = HuberFixedPoint(samples, 1e-4, 1000000, 1e-9);
    if (!fp.ok()) return fp.status();
    out.push_back({"huber_small_tau_median", "samples={0,0,0,10};tau=1e-4", 0.0,
                   *fp, std::abs(*fp) <= 1e-3});
  }
  return out;
}

}  // namespace dpboost
