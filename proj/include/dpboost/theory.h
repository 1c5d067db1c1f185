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

// Numerical companions to the convergence analysis of boosted clipped mean
// estimation: the infinite-sample recursion
//   mu_hat <- mu_hat + E[clip_tau(Y - mu_hat)],  Y ~ N(mu, 1),
// its contraction and round-count bounds, a finite-sample Monte-Carlo
// simulator for one- vs two-stage clipping, and the Huber fixed point.

#ifndef DPBOOST_THEORY_H_
#define DPBOOST_THEORY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpboost/matrix.h"
#include "dpboost/noise.h"

namespace dpboost {

struct MeanProblem {
  double mu_true = 0.0;
  double tau = 1.0;
  double alpha = 0.01;
};

// biases[t] = mu_hat_t - mu, with mu_hat_0 = 0 (so biases[0] = -mu).
struct BiasTrace {
  std::vector<double> biases;
};

// E[clip_tau(Z + m)] for Z ~ N(0, 1), in closed form.
absl::StatusOr<double> ExpectedClippedMean(double m, double tau);

// Deterministic recursion; the result has rounds + 1 entries.
absl::StatusOr<BiasTrace> MeanBoostingTrace(const MeanProblem& problem,
                                            int rounds);

// Contraction factor for |mu_t| <= tau: 3/2 - Phi(tau).
double SmallBiasContraction(double tau);
// Per-round decrease for |mu_t| > tau: (Phi(2 tau) - 1/2) tau.
double LargeBiasDecrement(double tau);

// max(0, |mu| - tau) / ((Phi(2 tau) - 1/2) tau)
//   + log(tau / alpha) / log(1 / (3/2 - Phi(tau))),
// clamped at 0 (the log term is negative when alpha > tau).
absl::StatusOr<double> RoundsBound(double mu, double tau, double alpha);

// (|mu| / 2) (Phi(tau + 2|mu|) - Phi(-tau)).
absl::StatusOr<double> OneRoundBiasLowerBound(double mu, double tau);

// sum_i H_tau(mu - y_i) with H_tau(r) = r^2/2 for |r| <= tau and
// tau |r| - tau^2/2 otherwise.
absl::StatusOr<double> HuberObjective(std::span<const double> samples,
                                      double tau, double mu);

// Iterates mu_hat <- mu_hat + mean_i clip_tau(y_i - mu_hat) from 0 until the
// update is at most `tol`. kDeadlineExceeded when max_iter is reached first.
absl::StatusOr<double> HuberFixedPoint(std::span<const double> samples,
                                       double tau, int max_iter, double tol);

// Inliers uniform on [mu - sigma, mu + sigma] plus `outlier_count` copies of
// `outlier_value`.
struct ContaminatedSample {
  Vector inlier_values;
  double outlier_value = 0.0;
  int outlier_count = 0;

  size_t n() const { return inlier_values.size() + outlier_count; }
  Vector Values() const;
};

absl::StatusOr<ContaminatedSample> MakeContaminatedSample(
    double mu, double sigma, double outlier_value, int outlier_count, int n,
    const NoiseDraw& noise);

// Data distribution for the finite-sample simulator.
struct MeanDistribution {
  enum class Kind { kPointMass, kUniform };
  Kind kind = Kind::kPointMass;
  double mu = 0.0;
  double sigma = 0.0;  // half-width for kUniform
};

struct FiniteSampleOptions {
  MeanDistribution dist;
  double bound = 1.0;  // B, the public support bound
  int n = 1;
  double rho = 1.0;    // total zCDP budget (rho = mu^2 in GDP terms)
  std::vector<double> tau_schedule;
  int trials = 1;
};

struct FiniteSampleResult {
  double mse = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo estimate of E[(mu_hat_T - mean(Y))^2]. The budget is split
// evenly over T + 1 Gaussian releases: the count n (noise sd sqrt((T+1)/rho))
// and each round's clipped residual sum (sd tau_t sqrt((T+1)/rho)). Round t
// updates mu_hat += (sum_i clip(Y_i - mu_hat, tau_t) + Z) / max(1, n + Z_1).
// Each trial draws from its own substream "trial/<i>", so the estimate does
// not depend on how trials are scheduled.
absl::StatusOr<FiniteSampleResult> FiniteSampleMeanMse(
    const FiniteSampleOptions& options, const NoiseDraw& noise);

// {B, max(B / (n sqrt(rho)), sigma) sqrt(c log n)}.
absl::StatusOr<std::vector<double>> TwoStageSchedule(double bound, int n,
                                                     double rho, double sigma,
                                                     double c = 4.0);

// One row of the verification table emitted by the `theory` subcommand.
struct TheoryCheck {
  std::string claim_id;
  std::string grid_point;
  double bound = 0.0;
  double observed = 0.0;
  bool pass = false;
};

struct TheorySuiteOptions {
  int separation_trials = 10000;
  uint64_t seed = 0;
};

// Contraction checks, round bounds, one-round bias bound,
// finite-sample separation and Huber fixed-point checks over fixed grids.
absl::StatusOr<std::vector<TheoryCheck>> RunTheorySuite(
    const TheorySuiteOptions& options);

}  // namespace dpboost

#endif  // DPBOOST_THEORY_H_
