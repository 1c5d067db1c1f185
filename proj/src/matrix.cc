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

#include "dpboost/matrix.h"

#include <algorithm>
#include <cmath>

namespace dpboost {

Matrix Matrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const size_t n = rows.size();
  const size_t p = n == 0 ? 0 : rows.begin()->size();
  Matrix m(n, p);
  size_t r = 0;
  for (const auto& row : rows) {
    size_t c = 0;
    for (double v : row) {
      if (c < p) m(r, c) = v;
      ++c;
    }
    ++r;
  }
  return m;
}

Matrix Matrix::Identity(size_t n) {
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

double AsymmetryOf(const Matrix& m) {
  double worst = 0.0;
  for (size_t i = 0; i < m.rows(); ++i) {
    for (size_t j = i + 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

double Norm2(std::span<const double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double x : v) {
    const double s = x / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

double FrobeniusNorm(const Matrix& m) { return Norm2(m.data()); }

}  // namespace dpboost
