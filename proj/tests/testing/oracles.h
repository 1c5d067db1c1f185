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

// Independent reference computations shared by unit and acceptance tests.
// None of these call into the library's linear algebra.

#ifndef DPBOOST_TESTS_TESTING_ORACLES_H_
#define DPBOOST_TESTS_TESTING_ORACLES_H_

#include <cmath>
#include <utility>

#include "dpboost/matrix.h"
#include "dpboost/regression.h"

namespace dpboost::testing {

// Gauss-Jordan inverse with partial pivoting.
inline Matrix GaussJordanInverse(Matrix a) {
  const size_t p = a.rows();
  Matrix inv = Matrix::Identity(p);
  for (size_t col = 0; col < p; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < p; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    for (size_t c = 0; c < p; ++c) {
      std::swap(a(col, c), a(pivot, c));
      std::swap(inv(col, c), inv(pivot, c));
    }
    const double d = a(col, col);
    for (size_t c = 0; c < p; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (size_t c = 0; c < p; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// (X^T X)^{-1} X^T y by the normal equations, accumulated in long double.
inline Vector OlsOracle(const Matrix& x, const Vector& y) {
  const size_t p = x.cols();
  Matrix g(p, p);
  Vector c(p, 0.0);
  for (size_t a = 0; a < p; ++a) {
    long double ca = 0;
    for (size_t i = 0; i < x.rows(); ++i) ca += static_cast<long double>(x(i, a)) * y[i];
    c[a] = static_cast<double>(ca);
    for (size_t b = 0; b < p; ++b) {
      long double gab = 0;
      for (size_t i = 0; i < x.rows(); ++i) gab += static_cast<long double>(x(i, a)) * x(i, b);
      g(a, b) = static_cast<double>(gab);
    }
  }
  const Matrix inv = GaussJordanInverse(g);
  Vector theta(p, 0.0);
  for (size_t a = 0; a < p; ++a) {
    for (size_t b = 0; b < p; ++b) theta[a] += inv(a, b) * c[b];
  }
  return theta;
}

inline Vector OlsOracle(const EncodedDataset& d) { return OlsOracle(d.x, d.y); }

inline double Distance(const Vector& a, const Vector& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace dpboost::testing

#endif  // DPBOOST_TESTS_TESTING_ORACLES_H_
