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

#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "dpboost/matrix.h"
#include "dpboost/noise.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/status_matchers.h"

namespace dpboost {
namespace {

using ::dpboost::testing::StatusIs;
using ::testing::ElementsAre;

TEST(ClipScalarTest, Examples) {
  EXPECT_EQ(*ClipScalar(5, 1), 1);
  EXPECT_EQ(*ClipScalar(-5, 1), -1);
  EXPECT_EQ(*ClipScalar(-0.3, 1), -0.3);
  EXPECT_EQ(*ClipScalar(0, 0.1), 0);
}

TEST(ClipScalarTest, RejectsNonFiniteAndBadThreshold) {
  EXPECT_THAT(ClipScalar(std::nan(""), 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ClipScalar(std::numeric_limits<double>::infinity(), 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ClipScalar(1, 0), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ClipScalar(1, -2), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ClipVectorL2Test, Examples) {
  auto scaled = ClipVectorL2(std::vector<double>{3, 4}, 1);
  ASSERT_OK(scaled);
  EXPECT_NEAR((*scaled)[0], 0.6, 1e-15);
  EXPECT_NEAR((*scaled)[1], 0.8, 1e-15);
  EXPECT_THAT(*ClipVectorL2(std::vector<double>{0.3, 0.4}, 1),
              ElementsAre(0.3, 0.4));
  EXPECT_THAT(*ClipVectorL2(std::vector<double>{0, 0, 0}, 2),
              ElementsAre(0, 0, 0));
  EXPECT_THAT(ClipVectorL2(std::vector<double>{1, std::nan("")}, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ClipVectorL2Test, ContractionAndNormProperties) {
  NoiseStream rng(NoiseDraw{11, "clip-props"});
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t p = 1 + rng.NextBelow(6);
    const double tau = 0.1 + 3 * rng.NextUniform();
    std::vector<double> x(p), y(p);
    for (size_t j = 0; j < p; ++j) {
      x[j] = 2 * rng.NextGaussian();
      y[j] = 2 * rng.NextGaussian();
    }
    ASSERT_OK_AND_ASSIGN(Vector cx, ClipVectorL2(x, tau));
    ASSERT_OK_AND_ASSIGN(Vector cy, ClipVectorL2(y, tau));
    EXPECT_LE(Norm2(cx), std::min(Norm2(x), tau) * (1 + 1e-15));
    Vector dx(p), dc(p);
    for (size_t j = 0; j < p; ++j) {
      dx[j] = x[j] - y[j];
      dc[j] = cx[j] - cy[j];
    }
    EXPECT_LE(Norm2(dc), Norm2(dx) * (1 + 1e-12));
    if (Norm2(x) <= tau) EXPECT_EQ(cx, x);

    const double a = 3 * rng.NextGaussian();
    const double b = 3 * rng.NextGaussian();
    EXPECT_LE(std::abs(*ClipScalar(a, tau) - *ClipScalar(b, tau)),
              std::abs(a - b));
  }
}

TEST(GaussianMechanismTest, ZeroSensitivityIsExact) {
  EXPECT_EQ(*GaussianMechanism(7.0, 0.0, 1.0, NoiseDraw{123, "x"}), 7.0);
  EXPECT_THAT(GaussianMechanism(7.0, 1.0, 0.0, NoiseDraw{}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GaussianMechanism(7.0, -1.0, 1.0, NoiseDraw{}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(GaussianMechanismTest, SeededDeterminism) {
  const std::vector<double> v = {1, 2, 3};
  auto a = GaussianMechanism(v, 1.0, 0.5, NoiseDraw{9, "cross/1"});
  auto b = GaussianMechanism(v, 1.0, 0.5, NoiseDraw{9, "cross/1"});
  auto c = GaussianMechanism(v, 1.0, 0.5, NoiseDraw{9, "cross/2"});
  ASSERT_OK(a);
  EXPECT_EQ(*a, *b);
  EXPECT_NE(*a, *c);
}

TEST(GaussianMechanismTest, VarianceMatchesCalibration) {
  const int n = 1000000;
  const std::vector<double> zeros(n, 0.0);
  ASSERT_OK_AND_ASSIGN(Vector draws,
                       GaussianMechanism(zeros, 2.0, 1.0, NoiseDraw{1, "var"}));
  double sum = 0, sum_sq = 0;
  for (double d : draws) {
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(var / 4.0, 1.0, 0.01);

  ASSERT_OK_AND_ASSIGN(Vector unit,
                       GaussianMechanism(zeros, 1.0, 1.0, NoiseDraw{2, "mean"}));
  double unit_sum = 0;
  for (double d : unit) unit_sum += d;
  EXPECT_NEAR(unit_sum / n, 0.0, 0.005);
}

TEST(GaussianMechanismSymmetricTest, ZeroSensitivityReturnsInput) {
  ASSERT_OK_AND_ASSIGN(Matrix out, GaussianMechanismSymmetric(
                                       Matrix::Identity(2), 0.0, 1.0, NoiseDraw{}));
  EXPECT_EQ(out, Matrix::Identity(2));
}

TEST(GaussianMechanismSymmetricTest, OutputAndNoiseAreExactlySymmetric) {
  const Matrix m = Matrix::FromRows({{2, 1, 0.5}, {1, 3, -1}, {0.5, -1, 4}});
  for (uint64_t seed = 0; seed < 100; ++seed) {
    ASSERT_OK_AND_ASSIGN(Matrix out,
                         GaussianMechanismSymmetric(m, 1.0, 0.3, NoiseDraw{seed, "g"}));
    EXPECT_EQ(AsymmetryOf(out), 0.0);
    Matrix noise = out;
    for (size_t i = 0; i < 3; ++i) {
      for (size_t j = 0; j < 3; ++j) noise(i, j) -= m(i, j);
    }
    EXPECT_EQ(AsymmetryOf(noise), 0.0);
  }
}

TEST(GaussianMechanismSymmetricTest, UpperTriangleVariance) {
  const int draws = 100000;
  const Matrix zero(3, 3);
  std::vector<double> sum_sq(9, 0.0);
  for (int k = 0; k < draws; ++k) {
    ASSERT_OK_AND_ASSIGN(
        Matrix out,
        GaussianMechanismSymmetric(zero, 1.0, 1.0,
                                   NoiseDraw{static_cast<uint64_t>(k), "sym"}));
    for (size_t i = 0; i < 9; ++i) sum_sq[i] += out.data()[i] * out.data()[i];
  }
  for (size_t i = 0; i < 3; ++i) {
    for (size_t j = i; j < 3; ++j) {
      EXPECT_NEAR(sum_sq[i * 3 + j] / draws, 1.0, 0.02) << i << "," << j;
    }
  }
}

TEST(GaussianMechanismSymmetricTest, RejectsNonSymmetricInput) {
  EXPECT_THAT(GaussianMechanismSymmetric(Matrix::FromRows({{1, 2}, {0, 1}}), 1,
                                         1, NoiseDraw{}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GaussianMechanismSymmetric(Matrix(2, 3), 1, 1, NoiseDraw{}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace dpboost
