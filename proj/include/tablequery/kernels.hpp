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

#ifndef TABLEQUERY_KERNELS_HPP_
#define TABLEQUERY_KERNELS_HPP_

#include <cstddef>
#include <string_view>

namespace tq::kernels {

// Dense double-precision primitives used by the neural scorer. Matrices are
// row-major with `cols` contiguous entries per row.
struct Ops {
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  // y += A x, A is rows x cols
  void (*gemv)(const double* a, const double* x, double* y, size_t rows, size_t cols);
  // y += A^T x, A is rows x cols
  void (*gemv_t)(const double* a, const double* x, double* y, size_t rows, size_t cols);
  // A += alpha * x y^T, A is rows x cols
  void (*ger)(double alpha, const double* x, const double* y, double* a, size_t rows, size_t cols);
};

const Ops& scalar();
// nullptr when the build has no AVX2 variant.
const Ops* avx2();
bool cpu_has_avx2();

// Chosen once per process: AVX2+FMA when the CPU supports them, unless the
// environment sets TQ_KERNELS=scalar.
const Ops& active();

}  // namespace tq::kernels

#endif  // TABLEQUERY_KERNELS_HPP_
