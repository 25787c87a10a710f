// Copyright 2026 The qnas Authors. All Rights Reserved.
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

// Dense double-precision kernels behind the autodiff engine. Each kernel has a
// scalar reference implementation and an AVX2+FMA variant; the variant is
// picked once at startup from CPUID and can be forced with QNAS_SIMD=scalar
// or QNAS_SIMD=avx2. All matrices are row-major and contiguous.
namespace qnas::simd {

enum class Level { kScalar, kAvx2 };

const char* level_name(Level level);

// Highest level the running CPU supports (and the build compiled in).
Level detected_level();
Level active_level();
// Overrides the dispatch target; throws InvalidArgument if unsupported.
void set_active_level(Level level);

struct KernelTable {
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // C[m,n] += A[m,k] * B[k,n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
  // C[k,n] += A[m,k]^T * B[m,n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
  // C[m,k] += A[m,n] * B[k,n]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
};

const KernelTable& kernels();
const KernelTable& kernels_for(Level level);

namespace scalar {
void axpy(std::size_t n, double alpha, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QNAS_HAVE_AVX2_KERNELS 1
namespace avx2 {
void axpy(std::size_t n, double alpha, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
}  // namespace avx2
#endif

}  // namespace qnas::simd
