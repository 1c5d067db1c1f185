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

#include "dpboost/kernels.h"

#include <atomic>
#include <cstdlib>

#include "absl/strings/string_view.h"

namespace dpboost::kernels {

#if defined(DPBOOST_HAVE_AVX2_KERNELS)
const KernelTable* Avx2TableUnchecked();
#endif

namespace {

bool HostHasAvx2() {
#if defined(DPBOOST_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* SelectDefault() {
  const KernelTable* avx2 = Avx2Kernels();
  if (const char* env = std::getenv("DPBOOST_ISA"); env != nullptr) {
    const absl::string_view requested(env);
    if (requested == "scalar") return &ScalarKernels();
    if (requested == "avx2" && avx2 != nullptr) return avx2;
  }
  return avx2 != nullptr ? avx2 : &ScalarKernels();
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{SelectDefault()};
  return slot;
}

}  // namespace

absl::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* Avx2Kernels() {
#if defined(DPBOOST_HAVE_AVX2_KERNELS)
  static const bool supported = HostHasAvx2();
  return supported ? Avx2TableUnchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

bool SetIsa(Isa isa) {
  const KernelTable* table =
      isa == Isa::kScalar ? &ScalarKernels() : Avx2Kernels();
  if (table == nullptr) return false;
  ActiveSlot().store(table, std::memory_order_release);
  return true;
}

}  // namespace dpboost::kernels
