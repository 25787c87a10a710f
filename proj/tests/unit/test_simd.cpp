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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "qnas/rng.hpp"
#include "qnas/simd/kernels.hpp"

using namespace qnas;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("dispatch reports a supported level") {
  auto lvl = simd::active_level();
  CHECK((lvl == simd::Level::kScalar || lvl == simd::Level::kAvx2));
  CHECK_NOTHROW(simd::set_active_level(simd::Level::kScalar));
  CHECK(simd::active_level() == simd::Level::kScalar);
  simd::set_active_level(lvl);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (simd::detected_level() != simd::Level::kAvx2) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const auto& s = simd::kernels_for(simd::Level::kScalar);
  const auto& v = simd::kernels_for(simd::Level::kAvx2);
  auto rng = make_rng(17);
  // Sizes straddle the vector width and unroll boundaries.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 100u}) {
    auto x = random_vec(n, rng), y = random_vec(n, rng);
    auto y2 = y;
    s.axpy(n, 0.75, x.data(), y.data());
    v.axpy(n, 0.75, x.data(), y2.data());
    CHECK(max_abs_diff(y, y2) <= 1e-14);
    CHECK(s.dot(n, x.data(), y.data()) == doctest::Approx(v.dot(n, x.data(), y.data())).epsilon(1e-12));
  }
  for (std::size_t m : {1u, 3u, 8u, 13u})
    for (std::size_t n : {1u, 4u, 5u, 16u, 19u})
      for (std::size_t k : {1u, 2u, 7u, 32u}) {
        auto a = random_vec(m * k, rng), b = random_vec(k * n, rng), c0 = random_vec(m * n, rng);
        auto c1 = c0, c2 = c0;
        s.gemm_nn(m, n, k, a.data(), b.data(), c1.data());
        v.gemm_nn(m, n, k, a.data(), b.data(), c2.data());
        CHECK(max_abs_diff(c1, c2) <= 1e-12);

        auto an = random_vec(m * k, rng), bn = random_vec(m * n, rng), d0 = random_vec(k * n, rng);
        auto d1 = d0, d2 = d0;
        s.gemm_tn(m, n, k, an.data(), bn.data(), d1.data());
        v.gemm_tn(m, n, k, an.data(), bn.data(), d2.data());
        CHECK(max_abs_diff(d1, d2) <= 1e-12);

        auto at = random_vec(m * n, rng), bt = random_vec(k * n, rng), e0 = random_vec(m * k, rng);
        auto e1 = e0, e2 = e0;
        s.gemm_nt(m, n, k, at.data(), bt.data(), e1.data());
        v.gemm_nt(m, n, k, at.data(), bt.data(), e2.data());
        CHECK(max_abs_diff(e1, e2) <= 1e-12);
      }
}

TEST_CASE("scalar gemm matches the triple loop") {
  auto rng = make_rng(5);
  const std::size_t m = 4, n = 3, k = 5;
  auto a = random_vec(m * k, rng), b = random_vec(k * n, rng);
  std::vector<double> c(m * n, 0.0), ref(m * n, 0.0);
  simd::scalar::gemm_nn(m, n, k, a.data(), b.data(), c.data());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) ref[i * n + j] += a[i * k + p] * b[p * n + j];
  CHECK(max_abs_diff(c, ref) <= 1e-14);
}

TEST_CASE("NaN propagates through gemm") {
  std::vector<double> a{0.0, 1.0}, b{std::nan(""), 2.0}, c{0.0};
  for (auto lvl : {simd::Level::kScalar, simd::detected_level()}) {
    c[0] = 0.0;
    simd::kernels_for(lvl).gemm_nn(1, 1, 2, a.data(), b.data(), c.data());
    CHECK(std::isnan(c[0]));
  }
}
