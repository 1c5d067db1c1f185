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

#include "dpboost/privacy.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpboost {
namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this point erfc() is close to underflow and the asymptotic expansion
// of the Mills ratio is accurate to well under 1e-16.
constexpr double kTailCutoff = -37.0;

// log(Phi(x) * |x| / phi(x)) for x <= kTailCutoff, from
// Phi(x)/phi(x) ~ (1/|x|)(1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
double LogTailSeries(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv_x2;
    sum += term;
  }
  return std::log(sum);
}

// log(Phi(x) / phi(x)), the log Mills-type ratio.
double LogCdfOverPdf(double x) {
  if (x <= kTailCutoff) return -std::log(-x) + LogTailSeries(x);
  return NormalLogCdf(x) + 0.5 * x * x + kLogSqrtTwoPi;
}

absl::Status CheckMuEpsilon(double mu, double epsilon) {
  if (!std::isfinite(mu) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("mu and epsilon must be finite");
  }
  if (mu <= 0.0) {
    return absl::InvalidArgumentError(absl::StrCat("mu must be positive, got ", mu));
  }
  if (epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be nonnegative, got ", epsilon));
  }
  return absl::OkStatus();
}

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double NormalPdf(double x) { return std::exp(-0.5 * x * x - kLogSqrtTwoPi); }

double NormalLogCdf(double x) {
  if (std::isnan(x)) return x;
  if (x <= kTailCutoff) {
    return -0.5 * x * x - kLogSqrtTwoPi - std::log(-x) + LogTailSeries(x);
  }
  if (x < 0.0) return std::log(NormalCdf(x));
  return std::log1p(-NormalCdf(-x));
}

absl::StatusOr<double> NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile level must lie in (0, 1), got ", p));
  }
  if (p > 0.5) {
    absl::StatusOr<double> mirrored = NormalQuantile(1.0 - p);
    if (!mirrored.ok()) return mirrored.status();
    return -*mirrored;
  }
  const double target = std::log(p);
  double lo = -40.0;
  double hi = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (NormalLogCdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> LogDeltaForMu(double mu, double epsilon) {
  if (absl::Status s = CheckMuEpsilon(mu, epsilon); !s.ok()) return s;
  const double a = -epsilon / mu + mu / 2.0;
  const double b = a - mu;
  // e^eps * phi(b) == phi(a) exactly, so
  //   delta = Phi(a) * (1 - exp(d)),  d = log(Phi(b)/phi(b)) - log(Phi(a)/phi(a)).
  const double d = LogCdfOverPdf(b) - LogCdfOverPdf(a);
  const double log_phi_a = NormalLogCdf(a);
  if (d >= 0.0) {
    // Cancellation left a non-positive difference. Tiny magnitudes are
    // rounding; anything larger means the CDF evaluation is broken.
    const double negative = -std::exp(log_phi_a) * std::expm1(d);
    if (negative < -1e-12) {
      return absl::InternalError(
          absl::StrCat("delta evaluated to ", negative, " at mu=", mu,
                       ", epsilon=", epsilon));
    }
    return -kInf;
  }
  return log_phi_a + std::log(-std::expm1(d));
}

absl::StatusOr<double> DeltaForMu(double mu, double epsilon) {
  absl::StatusOr<double> log_delta = LogDeltaForMu(mu, epsilon);
  if (!log_delta.ok()) return log_delta.status();
  return std::exp(*log_delta);
}

absl::StatusOr<double> MuForEpsilonLogDelta(double epsilon, double log_delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  if (std::isnan(log_delta) || log_delta >= 0.0 || log_delta == -kInf) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got log(delta)=", log_delta));
  }
  auto eval = [epsilon](double mu) { return LogDeltaForMu(mu, epsilon); };

  double lo = kMinSearchMu;
  double hi = kMaxSearchMu;
  absl::StatusOr<double> at_lo = eval(lo);
  absl::StatusOr<double> at_hi = eval(hi);
  if (!at_lo.ok()) return at_lo.status();
  if (!at_hi.ok()) return at_hi.status();
  if (*at_lo > log_delta || *at_hi < log_delta) {
    return absl::OutOfRangeError(absl::StrCat(
        "cannot bracket mu for epsilon=", epsilon, ", log(delta)=", log_delta,
        " within [", lo, ", ", hi, "]"));
  }
  for (int i = 0; i < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++i) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<double> value = eval(mid);
    if (!value.ok()) return value.status();
    if (*value < log_delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> MuForEpsilonDelta(double epsilon, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return MuForEpsilonLogDelta(epsilon, std::log(delta));
}

absl::StatusOr<double> Compose(std::span<const double> mus) {
  double sum_squares = 0.0;
  for (double mu : mus) {
    if (!std::isfinite(mu) || mu < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("composed mu must be finite and nonnegative, got ", mu));
    }
    sum_squares += mu * mu;
  }
  return std::sqrt(sum_squares);
}

absl::StatusOr<double> PerRoundBudget(double mu2, int rounds) {
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds must be at least 1, got ", rounds));
  }
  if (!std::isfinite(mu2) || mu2 < 0.0) {
    return absl::InvalidArgumentError("mu2 must be finite and nonnegative");
  }
  return mu2 / std::sqrt(static_cast<double>(rounds));
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::FromEpsilonDelta(double epsilon,
                                                              double delta) {
  absl::StatusOr<double> mu = MuForEpsilonDelta(epsilon, delta);
  if (!mu.ok()) return mu.status();
  return PrivacyBudget(epsilon, delta, *mu);
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::FromMu(double mu_total,
                                                    double epsilon) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  absl::StatusOr<double> delta = DeltaForMu(mu_total, epsilon);
  if (!delta.ok()) return delta.status();
  return PrivacyBudget(epsilon, *delta, mu_total);
}

absl::StatusOr<BudgetSplit> SplitBudget(double mu_total, SplitRatio ratio) {
  if (!std::isfinite(mu_total) || mu_total <= 0.0) {
    return absl::InvalidArgumentError("mu_total must be finite and positive");
  }
  for (double w : {ratio.a, ratio.b, ratio.c}) {
    if (!std::isfinite(w) || w < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("split weights must be finite and nonnegative, got ", w));
    }
  }
  const double norm = std::hypot(ratio.a, ratio.b, ratio.c);
  if (norm == 0.0) {
    return absl::InvalidArgumentError("split weights are all zero");
  }
  BudgetSplit split;
  split.ratio = ratio;
  split.mu1 = mu_total * (ratio.a / norm);
  split.mu2 = mu_total * (ratio.b / norm);
  split.mu3 = mu_total * (ratio.c / norm);
  return split;
}

absl::Status PrivacyLedger::Record(std::string label, double mu,
                                   double sensitivity) {
  if (!std::isfinite(mu) || mu < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("release '", label, "' has invalid mu ", mu));
  }
  const double next = sum_squares_ + mu * mu;
  if (next > mu_limit_ * mu_limit_ * (1.0 + 2e-12)) {
    return absl::InternalError(absl::StrCat(
        "release '", label, "' would raise the composed budget to ",
        std::sqrt(next), " beyond the limit ", mu_limit_));
  }
  sum_squares_ = next;
  entries_.push_back({std::move(label), mu, sensitivity});
  return absl::OkStatus();
}

double PrivacyLedger::Composed() const {
  std::vector<double> mus;
  mus.reserve(entries_.size());
  for (const Entry& e : entries_) mus.push_back(e.mu);
  return *Compose(mus);
}

}  // namespace dpboost
