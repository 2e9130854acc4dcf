// Copyright 2026 The GDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gdp/kernels/kernels.h"

namespace gdp::kernels {

#if !defined(GDP_HAVE_AVX2)
const KernelTable* Avx2Kernels() { return nullptr; }
#endif

namespace {

const KernelTable* TableFor(Isa isa) {
  return isa == Isa::kAvx2 ? Avx2Kernels() : &ScalarKernels();
}

const KernelTable* InitialTable() {
  if (const char* forced = std::getenv("GDP_ISA")) {
    const std::string_view name(forced);
    if (name == "scalar") return &ScalarKernels();
    if (name == "avx2" && CpuSupports(Isa::kAvx2)) return Avx2Kernels();
  }
  return CpuSupports(Isa::kAvx2) ? Avx2Kernels() : &ScalarKernels();
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{InitialTable()};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool CpuSupports(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if defined(GDP_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

Isa ActiveIsa() { return Active().isa; }

void SetActiveIsa(Isa isa) {
  if (!CpuSupports(isa) || TableFor(isa) == nullptr) {
    throw std::invalid_argument("kernel ISA not available: " +
                                std::string(IsaName(isa)));
  }
  ActiveSlot().store(TableFor(isa), std::memory_order_release);
}

}  // namespace gdp::kernels
