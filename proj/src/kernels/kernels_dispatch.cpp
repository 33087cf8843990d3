// Copyright 2026 The vte-nlp Authors.
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
#include <string>

#include "kernels_internal.hpp"

namespace vte::kernels {
namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, scalar::dot, scalar::axpy, scalar::gemv,
                                   scalar::gemv_t, scalar::ger};

#if defined(VTE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, avx2::dot, avx2::axpy, avx2::gemv,
                                 avx2::gemv_t, avx2::ger};
#endif

bool cpu_has_avx2() {
#if defined(VTE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("VTE_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &kScalarTable;
  if (const KernelTable* t = table_for(Isa::kAvx2)) return t;
  return &kScalarTable;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return kScalarTable; }

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(VTE_HAVE_AVX2)
      if (cpu_has_avx2()) return &kAvx2Table;
#endif
      return nullptr;
  }
  return nullptr;
}

bool isa_supported(Isa isa) { return table_for(isa) != nullptr; }

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool set_active(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace vte::kernels
