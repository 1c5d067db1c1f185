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

#include "dpboost/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpboost {
namespace {

absl::Status CheckTau(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("clipping threshold must be finite and positive, got ", tau));
  }
  return absl::OkStatus();
}

absl::Status CheckNoiseParameters(double sensitivity, double mu) {
  if (!std::isfinite(sensitivity) || sensitivity < 0.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity must be finite and nonnegative, got ", sensitivity));
  }
  if (!std::isfinite(mu) || mu <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("mu must be finite and positive, got ", mu));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> ClipScalar(double x, double tau) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError(absl::StrCat("cannot clip non-finite value ", x));
  }
  return std::clamp(x, -tau, tau);
}

absl::Status ClipVectorL2InPlace(std::span<double> x, double tau) {
  if (absl::Status s = CheckTau(tau); !s.ok()) return s;
  if (!AllFinite(x)) {
    return absl::InvalidArgumentError("cannot clip a vector with non-finite entries");
  }
  const double norm = Norm2(x);
  if (norm > tau) {
    const double scale = tau / norm;
    for (double& v : x) v *= scale;
    // Rounding can leave the norm an ulp above tau; shrink until it is not.
    while (Norm2(x) > tau) {
      for (double& v : x) v *= 1.0 - 0x1.0p-52;
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Vector> ClipVectorL2(std::span<const double> x, double tau) {
  Vector out(x.begin(), x.end());
  if (absl::Status s = ClipVectorL2InPlace(out, tau); !s.ok()) return s;
  return out;
}

absl::StatusOr<double> GaussianMechanism(double value, double sensitivity,
                                         double mu, const NoiseDraw& noise) {
  absl::StatusOr<Vector> out =
      GaussianMechanism(std::span<const double>(&value, 1), sensitivity, mu, noise);
  if (!out.ok()) return out.status();
  return (*out)[0];
}

absl::StatusOr<Vector> GaussianMechanism(std::span<const double> value,
                                         double sensitivity, double mu,
                                         const NoiseDraw& noise) {
  if (absl::Status s = CheckNoiseParameters(sensitivity, mu); !s.ok()) return s;
  Vector out(value.begin(), value.end());
  if (sensitivity == 0.0) return out;
  const double stddev = sensitivity / mu;
  NoiseStream stream(noise);
  for (double& v : out) v += stddev * stream.NextGaussian();
  return out;
}

absl::StatusOr<Matrix> GaussianMechanismSymmetric(const Matrix& mat,
                                                  double sensitivity, double mu,
                                                  const NoiseDraw& noise) {
  if (absl::Status s = CheckNoiseParameters(sensitivity, mu); !s.ok()) return s;
  if (mat.rows() != mat.cols()) {
    return absl::InvalidArgumentError("symmetric release needs a square matrix");
  }
  double scale = 1.0;
  for (double v : mat.data()) scale = std::max(scale, std::abs(v));
  if (!AllFinite(mat.data()) || AsymmetryOf(mat) > 1e-12 * scale) {
    return absl::InvalidArgumentError("input to symmetric release is not symmetric");
  }
  Matrix out = mat;
  const size_t p = mat.rows();
  // Exact mirror of the input's upper triangle, even when noise is skipped.
  for (size_t i = 0; i < p; ++i) {
    for (size_t j = i + 1; j < p; ++j) out(j, i) = out(i, j);
  }
  if (sensitivity == 0.0) return out;
  const double stddev = sensitivity / mu;
  NoiseStream stream(noise);
  for (size_t i = 0; i < p; ++i) {
    for (size_t j = i; j < p; ++j) {
      out(i, j) += stddev * stream.NextGaussian();
      out(j, i) = out(i, j);
    }
  }
  return out;
}

}  // namespace dpboost
