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

#include <algorithm>
#include <cstddef>

#include "dpboost/kernels.h"

namespace dpboost::kernels {
namespace {

double Dot(const double* a, const double* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void GemvT(const double* x, size_t n, size_t p, const double* v, double* out) {
  std::fill(out, out + p, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double* row = x + i * p;
    const double vi = v[i];
    for (size_t j = 0; j < p; ++j) out[j] += row[j] * vi;
  }
}

void Gemv(const double* x, size_t n, size_t p, const double* theta,
          double* out) {
  for (size_t i = 0; i < n; ++i) out[i] = Dot(x + i * p, theta, p);
}

void GramUpper(const double* x, size_t n, size_t p, double* out) {
  for (size_t r = 0; r < n; ++r) {
    const double* row = x + r * p;
    for (size_t i = 0; i < p; ++i) {
      const double xi = row[i];
      double* out_row = out + i * p;
      for (size_t j = i; j < p; ++j) out_row[j] += xi * row[j];
    }
  }
}

void ClippedResiduals(const double* y, const double* pred, size_t n,
                      double tau, double* out) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = std::clamp(y[i] - pred[i], -tau, tau);
  }
}

double ClippedSum(const double* v, size_t n, double shift, double tau) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += std::clamp(v[i] - shift, -tau, tau);
  return sum;
}

constexpr KernelTable kScalarTable = {
    Isa::kScalar, &Dot, &GemvT, &Gemv, &GramUpper, &ClippedResiduals,
    &ClippedSum,
};

}  // namespace

const KernelTable& ScalarKernels() { return kScalarTable; }

}  // namespace dpboost::kernels
