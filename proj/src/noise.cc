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

#include "dpboost/noise.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"

namespace dpboost {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

NoiseDraw NoiseDraw::Substream(absl::string_view suffix) const {
  return {seed, absl::StrCat(stream_label, "/", suffix)};
}

uint64_t StreamKey(const NoiseDraw& draw) {
  // FNV-1a over the label, then mixed with the seed.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : draw.stream_label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix(Mix(draw.seed + kGolden) ^ h);
}

uint64_t NoiseStream::NextBits() {
  ++counter_;
  return Mix(key_ + counter_ * kGolden);
}

double NoiseStream::NextUniform() {
  return static_cast<double>((NextBits() >> 11) + 1) * 0x1.0p-53;
}

uint64_t NoiseStream::NextBelow(uint64_t bound) {
  // Rejection keeps the result exactly uniform.
  const uint64_t limit = bound * (~uint64_t{0} / bound);
  uint64_t bits = NextBits();
  while (bits >= limit) bits = NextBits();
  return bits % bound;
}

double NoiseStream::NextGaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace dpboost
