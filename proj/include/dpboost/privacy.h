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

// Gaussian differential privacy accounting: conversion between mu-GDP and
// (epsilon, delta)-DP, composition, and the budget split used by the
// sufficient-statistics learners.

#ifndef DPBOOST_PRIVACY_H_
#define DPBOOST_PRIVACY_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpboost {

// Search interval for the mu that meets an (epsilon, delta) target.
inline constexpr double kMinSearchMu = 1e-10;
inline constexpr double kMaxSearchMu = 100.0;

// Standard normal CDF, density and log-CDF. NormalLogCdf stays accurate far
// into the lower tail where NormalCdf underflows.
double NormalCdf(double x);
double NormalPdf(double x);
double NormalLogCdf(double x);

// Quantile of the standard normal; p in (0, 1).
absl::StatusOr<double> NormalQuantile(double p);

// delta(epsilon) of a mu-GDP mechanism:
//   Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2).
// Evaluated in log space, so tiny deltas are relative-accurate. DeltaForMu
// returns 0 when the value underflows a double; use LogDeltaForMu there.
absl::StatusOr<double> DeltaForMu(double mu, double epsilon);
absl::StatusOr<double> LogDeltaForMu(double mu, double epsilon);

// Smallest-interval bisection over mu in [kMinSearchMu, kMaxSearchMu];
// delta(mu) is strictly increasing in mu for fixed epsilon.
absl::StatusOr<double> MuForEpsilonDelta(double epsilon, double delta);
absl::StatusOr<double> MuForEpsilonLogDelta(double epsilon, double log_delta);

// sqrt(sum mu_i^2). Empty input composes to 0.
absl::StatusOr<double> Compose(std::span<const double> mus);

// mu2 / sqrt(rounds): the per-round share of mu2 so that `rounds` releases
// compose back to mu2.
absl::StatusOr<double> PerRoundBudget(double mu2, int rounds);

// (epsilon, delta) target together with the equivalent GDP parameter.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> FromEpsilonDelta(double epsilon,
                                                        double delta);
  // Derives delta from (mu, epsilon). Delta may round to 1 for the very large
  // mu used to emulate an unbounded budget.
  static absl::StatusOr<PrivacyBudget> FromMu(double mu_total, double epsilon);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  double mu_total() const { return mu_total_; }

 private:
  PrivacyBudget(double epsilon, double delta, double mu_total)
      : epsilon_(epsilon), delta_(delta), mu_total_(mu_total) {}

  double epsilon_;
  double delta_;
  double mu_total_;
};

// Ratio weights a:b:c for the (gram, cross term, lambda) releases.
struct SplitRatio {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

struct BudgetSplit {
  SplitRatio ratio;
  double mu1 = 0.0;  // gram
  double mu2 = 0.0;  // cross term(s)
  double mu3 = 0.0;  // minimum eigenvalue
};

absl::StatusOr<BudgetSplit> SplitBudget(double mu_total, SplitRatio ratio);

// Record of every noisy release made by a fit.
class PrivacyLedger {
 public:
  struct Entry {
    std::string label;
    double mu;
    double sensitivity;
  };

  explicit PrivacyLedger(double mu_limit) : mu_limit_(mu_limit) {}

  // Fails with kInternal when the release would push the composed budget past
  // the limit (relative slack 1e-12).
  absl::Status Record(std::string label, double mu, double sensitivity);

  double Composed() const;
  double limit() const { return mu_limit_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  double mu_limit_;
  double sum_squares_ = 0.0;
  std::vector<Entry> entries_;
};

}  // namespace dpboost

#endif  // DPBOOST_PRIVACY_H_
