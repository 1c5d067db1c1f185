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

// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma,
// so it must not instantiate any inline library templates (they could be
// merged with the baseline copies at link time). Only raw loops and
// intrinsics live here.

#include <immintrin.h>

#include <cstddef>

#include "dpboost/kernels.h"

namespace dpboost::kernels {
namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double Dot(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

// out[0..p) += s * row[0..p)
inline void Axpy(double s, const double* row, double* out, size_t p) {
  const __m256d vs = _mm256_set1_pd(s);
  size_t j = 0;
  for (; j + 4 <= p; j += 4) {
    _mm256_storeu_pd(out + j, _mm256_fmadd_pd(vs, _mm256_loadu_pd(row + j),
                                              _mm256_loadu_pd(out + j)));
  }
  for (; j < p; ++j) out[j] += s * row[j];
}

void GemvT(const double* x, size_t n, size_t p, const double* v, double* out) {
  for (size_t j = 0; j < p; ++j) out[j] = 0.0;
  if (p == 1) {
    out[0] = Dot(x, v, n);
    return;
  }
  if (p == 2) {
    // Two interleaved columns: lanes hold (x0, x1, x0', x1').
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const __m256d rows = _mm256_loadu_pd(x + 2 * i);
      const __m256d w = _mm256_set_pd(v[i + 1], v[i + 1], v[i], v[i]);
      acc = _mm256_fmadd_pd(rows, w, acc);
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    out[0] = _mm_cvtsd_f64(s);
    out[1] = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
    for (; i < n; ++i) {
      out[0] += x[2 * i] * v[i];
      out[1] += x[2 * i + 1] * v[i];
    }
    return;
  }
  for (size_t i = 0; i < n; ++i) Axpy(v[i], x + i * p, out, p);
}

void Gemv(const double* x, size_t n, size_t p, const double* theta,
          double* out) {
  if (p == 2) {
    const __m256d t = _mm256_set_pd(theta[1], theta[0], theta[1], theta[0]);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + 2 * i), t);
      // (a0 + a1, b0 + b1) from (a0, a1, b0, b1).
      const __m256d h = _mm256_hadd_pd(prod, prod);
      out[i] = _mm256_cvtsd_f64(h);
      out[i + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(h, 1));
    }
    for (; i < n; ++i) out[i] = x[2 * i] * theta[0] + x[2 * i + 1] * theta[1];
    return;
  }
  for (size_t i = 0; i < n; ++i) out[i] = Dot(x + i * p, theta, p);
}

void GramUpper(const double* x, size_t n, size_t p, double* out) {
  for (size_t r = 0; r < n; ++r) {
    const double* row = x + r * p;
    for (size_t i = 0; i < p; ++i) {
      Axpy(row[i], row + i, out + i * p + i, p - i);
    }
  }
}

void ClippedResiduals(const double* y, const double* pred, size_t n,
                      double tau, double* out) {
  const __m256d hi = _mm256_set1_pd(tau);
  const __m256d lo = _mm256_set1_pd(-tau);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(pred + i));
    _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(r, lo), hi));
  }
  for (; i < n; ++i) {
    const double r = y[i] - pred[i];
    out[i] = r < -tau ? -tau : (r > tau ? tau : r);
  }
}

double ClippedSum(const double* v, size_t n, double shift, double tau) {
  const __m256d hi = _mm256_set1_pd(tau);
  const __m256d lo = _mm256_set1_pd(-tau);
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(v + i), vshift);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(v + i + 4), vshift);
    acc0 = _mm256_add_pd(acc0, _mm256_min_pd(_mm256_max_pd(a, lo), hi));
    acc1 = _mm256_add_pd(acc1, _mm256_min_pd(_mm256_max_pd(b, lo), hi));
  }
  double sum = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double r = v[i] - shift;
    sum += r < -tau ? -tau : (r > tau ? tau : r);
  }
  return sum;
}

constexpr KernelTable kAvx2Table = {
    Isa::kAvx2, &Dot, &GemvT, &Gemv, &GramUpper, &ClippedResiduals,
    &ClippedSum,
};

}  // namespace

// Defined here so the table address is only reachable through dispatch.cc.
const KernelTable* Avx2TableUnchecked() { return &kAvx2Table; }

}  // namespace dpboost::kernels
