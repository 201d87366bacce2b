// Copyright 2026 The TableQuery Authors.
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

#include "tablequery/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tq::kernels {

namespace {

double dot(const double* a, const double* b, size_t n) {
  double s = 0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, const double* x, double* y, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) y[r] += dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, const double* x, double* y, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void ger(double alpha, const double* x, const double* y, double* a, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) axpy(alpha * x[r], y, a + r * cols, cols);
}

}  // namespace

const Ops& scalar() {
  static const Ops kOps{"scalar", dot, axpy, gemv, gemv_t, ger};
  return kOps;
}

#ifndef TQ_HAVE_AVX2
const Ops* avx2() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& active() {
  static const Ops* chosen = [] {
    const char* env = std::getenv("TQ_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar();
    if (avx2() != nullptr && cpu_has_avx2()) return avx2();
    return &scalar();
  }();
  return *chosen;
}

}  // namespace tq::kernels
