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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "qnas/error.hpp"
#include "qnas/simd/kernels.hpp"

namespace qnas::simd {

namespace {

constexpr KernelTable kScalarTable{scalar::axpy, scalar::dot, scalar::gemm_nn, scalar::gemm_tn, scalar::gemm_nt};
#ifdef QNAS_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2Table{avx2::axpy, avx2::dot, avx2::gemm_nn, avx2::gemm_tn, avx2::gemm_nt};
#endif

bool cpu_has_avx2() {
#ifdef QNAS_HAVE_AVX2_KERNELS
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level initial_level() {
  Level best = detected_level();
  if (const char* env = std::getenv("QNAS_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Level::kScalar;
    if (std::strcmp(env, "avx2") == 0 && best == Level::kAvx2) return Level::kAvx2;
  }
  return best;
}

std::atomic<Level>& level_slot() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

const char* level_name(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
  }
  return "?";
}

Level detected_level() {
  static const Level detected = cpu_has_avx2() ? Level::kAvx2 : Level::kScalar;
  return detected;
}

Level active_level() { return level_slot().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (level == Level::kAvx2 && detected_level() != Level::kAvx2)
    throw InvalidArgument("AVX2 kernels not supported on this CPU");
  level_slot().store(level, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Level level) {
#ifdef QNAS_HAVE_AVX2_KERNELS
  if (level == Level::kAvx2) return kAvx2Table;
#endif
  (void)level;
  return kScalarTable;
}

const KernelTable& kernels() { return kernels_for(active_level()); }

}  // namespace qnas::simd
