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

#ifndef DPBOOST_NOISE_H_
#define DPBOOST_NOISE_H_

#include <cstdint>
#include <string>

#include "absl/strings/string_view.h"

namespace dpboost {

// Identifies one reproducible noise stream. Each released statistic gets its
// own label, so streams for different releases never share draws.
struct NoiseDraw {
  uint64_t seed = 0;
  std::string stream_label;

  // Child stream "<label>/<suffix>".
  NoiseDraw Substream(absl::string_view suffix) const;
};

// 64-bit key derived from (seed, label).
uint64_t StreamKey(const NoiseDraw& draw);

// Counter-based generator: the i-th output is a pure function of
// (StreamKey, i), computed with the SplitMix64 finalizer. The integer stream
// is identical on every platform; Gaussian draws additionally depend on the
// host libm's log/sin/cos.
class NoiseStream {
 public:
  explicit NoiseStream(const NoiseDraw& draw) : key_(StreamKey(draw)) {}
  explicit NoiseStream(uint64_t key) : key_(key) {}

  uint64_t NextBits();

  // Uniform on (0, 1].
  double NextUniform();

  // Uniform integer in [0, bound); bound > 0.
  uint64_t NextBelow(uint64_t bound);

  // Standard normal via the Box-Muller transform.
  double NextGaussian();

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpboost

#endif  // DPBOOST_NOISE_H_
