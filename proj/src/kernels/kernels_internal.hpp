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

#include "vte/kernels.hpp"

namespace vte::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          double* y);
void gemv_t(const double* w, std::size_t rows, std::size_t cols, const double* x,
            double* y);
void ger(const double* x, std::size_t rows, const double* y, std::size_t cols,
         double* w);
}  // namespace scalar

#if defined(VTE_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          double* y);
void gemv_t(const double* w, std::size_t rows, std::size_t cols, const double* x,
            double* y);
void ger(const double* x, std::size_t rows, const double* y, std::size_t cols,
         double* w);
}  // namespace avx2
#endif

}  // namespace vte::kernels
