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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision kernels used by the recurrent classifiers. A scalar
// reference implementation is always compiled; vectorized variants are
// compiled per ISA and picked at startup from what the CPU reports. Tests pin
// each variant against the scalar reference.
namespace vte::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] += sum_c w[r * cols + c] * x[c]            (row-major w)
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
               double* y);
  // y[c] += sum_r w[r * cols + c] * x[r]
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* y);
  // w[r * cols + c] += x[r] * y[c]
  void (*ger)(const double* x, std::size_t rows, const double* y, std::size_t cols,
              double* w);
};

const KernelTable& scalar_table();

// Null when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

bool isa_supported(Isa isa);

// Best supported table, unless overridden by set_active() or the VTE_SIMD
// environment variable ("scalar" or "avx2") read on first use.
const KernelTable& active();

// Returns false (and leaves the selection alone) if the ISA is unavailable.
bool set_active(Isa isa);

// Span conveniences over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace vte::kernels
