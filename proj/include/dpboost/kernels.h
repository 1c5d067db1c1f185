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

// Data-parallel inner loops used by the regression, boosting and
// mean-estimation code. Every kernel has a portable scalar reference
// implementation; vectorized variants are selected once at runtime from the
// host CPU features and must agree with the reference up to summation-order
// rounding.
//
// Selection can be pinned with the environment variable DPBOOST_ISA
// ("scalar" or "avx2") or programmatically with SetIsa().

#ifndef DPBOOST_KERNELS_H_
#define DPBOOST_KERNELS_H_

#include <cstddef>

#include "absl/strings/string_view.h"

namespace dpboost::kernels {

enum class Isa { kScalar, kAvx2 };

absl::string_view IsaName(Isa isa);

// All matrices are dense row-major with `n` rows and `p` columns.
struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, size_t n);

  // out[j] = sum_i x[i, j] * v[i]   (X^T v)
  void (*gemv_t)(const double* x, size_t n, size_t p, const double* v,
                 double* out);

  // out[i] = sum_j x[i, j] * theta[j]   (X theta)
  void (*gemv)(const double* x, size_t n, size_t p, const double* theta,
               double* out);

  // Accumulates the upper triangle (j >= i) of X^T X into the p x p buffer
  // `out`; the strict lower triangle is left untouched.
  void (*gram_upper)(const double* x, size_t n, size_t p, double* out);

  // out[i] = clamp(y[i] - pred[i], -tau, tau)
  void (*clipped_residuals)(const double* y, const double* pred, size_t n,
                            double tau, double* out);

  // sum_i clamp(v[i] - shift, -tau, tau)
  double (*clipped_sum)(const double* v, size_t n, double shift, double tau);
};

const KernelTable& ScalarKernels();

// Null when the vectorized variant was not compiled in or the CPU lacks the
// required features.
const KernelTable* Avx2Kernels();

// The table used by the library. Chosen on first use.
const KernelTable& Active();

// Pins the active table. Returns false (and leaves the selection unchanged)
// when the requested ISA is unavailable on this host.
bool SetIsa(Isa isa);

}  // namespace dpboost::kernels

#endif  // DPBOOST_KERNELS_H_
