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

// Clipping operators and the Gaussian mechanism for scalars, vectors and
// symmetric matrices. A mechanism releasing a statistic of l2-sensitivity
// `sensitivity` with noise N(0, (sensitivity / mu)^2) per coordinate is
// mu-GDP.

#ifndef DPBOOST_MECHANISMS_H_
#define DPBOOST_MECHANISMS_H_

#include <span>

#include "absl/status/statusor.h"
#include "dpboost/matrix.h"
#include "dpboost/noise.h"

namespace dpboost {

// x * min(1, tau / |x|). Non-finite input is an error rather than saturated.
absl::StatusOr<double> ClipScalar(double x, double tau);

// x * min(1, tau / ||x||_2).
absl::StatusOr<Vector> ClipVectorL2(std::span<const double> x, double tau);

// In-place variant used on design-matrix rows; same contract.
absl::Status ClipVectorL2InPlace(std::span<double> x, double tau);

absl::StatusOr<double> GaussianMechanism(double value, double sensitivity,
                                         double mu, const NoiseDraw& noise);

absl::StatusOr<Vector> GaussianMechanism(std::span<const double> value,
                                         double sensitivity, double mu,
                                         const NoiseDraw& noise);

// Adds i.i.d. noise to the upper triangle (diagonal included, row-major
// order) and mirrors it, so the output is exactly symmetric. The input must
// be symmetric within 1e-12 (relative to its largest entry, floor 1).
absl::StatusOr<Matrix> GaussianMechanismSymmetric(const Matrix& mat,
                                                  double sensitivity, double mu,
                                                  const NoiseDraw& noise);

}  // namespace dpboost

#endif  // DPBOOST_MECHANISMS_H_
