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

#include "qnas/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnas/error.hpp"
#include "qnas/simd/kernels.hpp"

namespace qnas::ad {

namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " + b.shape_str());
}

void require_same(const char* op, const Var& a, const Var& b) {
  if (!a.value().same_shape(b.value())) shape_fail(op, a.value(), b.value());
}

// Elementwise unary op given f(x) and f'(x, f(x)).
template <class F, class DF>
Var unary(const Var& a, F f, DF df) {
  const Tensor& x = a.value();
  Tensor y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  Tensor yc = y;
  return record(std::move(y), {a}, [x = a.value(), yc = std::move(yc), df](const Tensor& g, std::span<Tensor* const> pg) {
    Tensor& ga = *pg[0];
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i], yc[i]);
  });
}

void check_segments(const char* op, const Var& e, const CsrPtr& csr) {
  if (e.rows() != csr->num_entries())
    throw ShapeError(std::string(op) + ": entry tensor has " + std::to_string(e.rows()) + " rows, index has " +
                     std::to_string(csr->num_entries()) + " entries");
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.rows()) shape_fail("matmul", A, B);
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(m, n);
  simd::kernels().gemm_nn(m, n, k, A.data(), B.data(), C.data());
  return record(std::move(C), {a, b}, [A, B, m, n, k](const Tensor& g, std::span<Tensor* const> pg) {
    const auto& kt = simd::kernels();
    if (pg[0]) kt.gemm_nt(m, n, k, g.data(), B.data(), pg[0]->data());  // dA = g B^T
    if (pg[1]) kt.gemm_tn(m, n, k, A.data(), g.data(), pg[1]->data());  // dB = A^T g
  });
}

Var add(const Var& a, const Var& b) {
  require_same("add", a, b);
  Tensor y = a.value();
  y.add_scaled(b.value());
  return record(std::move(y), {a, b}, [](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0]) pg[0]->add_scaled(g);
    if (pg[1]) pg[1]->add_scaled(g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same("sub", a, b);
  Tensor y = a.value();
  y.add_scaled(b.value(), -1.0);
  return record(std::move(y), {a, b}, [](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0]) pg[0]->add_scaled(g);
    if (pg[1]) pg[1]->add_scaled(g, -1.0);
  });
}

Var mul(const Var& a, const Var& b) {
  require_same("mul", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  Tensor y(A.rows(), A.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] * B[i];
  return record(std::move(y), {a, b}, [A, B](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0])
      for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i] * B[i];
    if (pg[1])
      for (std::size_t i = 0; i < g.size(); ++i) (*pg[1])[i] += g[i] * A[i];
  });
}

Var div(const Var& a, const Var& b) {
  require_same("div", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  Tensor y(A.rows(), A.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] / B[i];
  return record(std::move(y), {a, b}, [A, B](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0])
      for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i] / B[i];
    if (pg[1])
      for (std::size_t i = 0; i < g.size(); ++i) (*pg[1])[i] -= g[i] * A[i] / (B[i] * B[i]);
  });
}

Var add_row(const Var& a, const Var& row) {
  const Tensor& A = a.value();
  const Tensor& R = row.value();
  if (R.rows() != 1 || R.cols() != A.cols()) shape_fail("add_row", A, R);
  Tensor y = A;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double* yr = y.row(i);
    for (std::size_t j = 0; j < A.cols(); ++j) yr[j] += R[j];
  }
  return record(std::move(y), {a, row}, [](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0]) pg[0]->add_scaled(g);
    if (pg[1]) {
      Tensor& gr = *pg[1];
      for (std::size_t i = 0; i < g.rows(); ++i) {
        const double* gi = g.row(i);
        for (std::size_t j = 0; j < g.cols(); ++j) gr[j] += gi[j];
      }
    }
  });
}

Var mul_row(const Var& a, const Var& row) {
  const Tensor& A = a.value();
  const Tensor& R = row.value();
  if (R.rows() != 1 || R.cols() != A.cols()) shape_fail("mul_row", A, R);
  Tensor y(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) y(i, j) = A(i, j) * R[j];
  return record(std::move(y), {a, row}, [A, R](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) {
        const double gij = g(i, j);
        if (pg[0]) (*pg[0])(i, j) += gij * R[j];
        if (pg[1]) (*pg[1])[j] += gij * A(i, j);
      }
  });
}

Var mul_col(const Var& a, const Var& col) {
  const Tensor& A = a.value();
  const Tensor& C = col.value();
  if (C.cols() != 1 || C.rows() != A.rows()) shape_fail("mul_col", A, C);
  Tensor y(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) y(i, j) = A(i, j) * C[i];
  return record(std::move(y), {a, col}, [A, C](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < g.cols(); ++j) {
        if (pg[0]) (*pg[0])(i, j) += g(i, j) * C[i];
        acc += g(i, j) * A(i, j);
      }
      if (pg[1]) (*pg[1])[i] += acc;
    }
  });
}

Var scale_by(const Var& a, const Var& s) {
  if (s.value().size() != 1) shape_fail("scale_by", a.value(), s.value());
  const double sv = s.value()[0];
  Tensor y(a.rows(), a.cols());
  const Tensor& A = a.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] * sv;
  return record(std::move(y), {a, s}, [A, sv](const Tensor& g, std::span<Tensor* const> pg) {
    if (pg[0]) pg[0]->add_scaled(g, sv);
    if (pg[1]) (*pg[1])[0] += simd::kernels().dot(g.size(), g.data(), A.data());
  });
}

Var scale(const Var& a, double s) {
  Tensor y(a.rows(), a.cols());
  const Tensor& A = a.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A[i] * s;
  return record(std::move(y), {a}, [s](const Tensor& g, std::span<Tensor* const> pg) { pg[0]->add_scaled(g, s); });
}

Var add_scalar(const Var& a, double s) {
  Tensor y = a.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s;
  return record(std::move(y), {a}, [](const Tensor& g, std::span<Tensor* const> pg) { pg[0]->add_scaled(g); });
}

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var sqrt(const Var& a) {
  return unary(a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Var sigmoid(const Var& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var& a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; }, [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
  return unary(
      a, [slope](double x) { return x > 0 ? x : slope * x; },
      [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Var elu(const Var& a, double alpha) {
  return unary(
      a, [alpha](double x) { return x > 0 ? x : alpha * std::expm1(x); },
      [alpha](double x, double y) { return x > 0 ? 1.0 : y + alpha; });
}

Var activate(Activation kind, const Var& a) {
  switch (kind) {
    case Activation::kSigmoid: return sigmoid(a);
    case Activation::kTanh: return tanh(a);
    case Activation::kRelu: return relu(a);
    case Activation::kLinear: return a;
    case Activation::kLeakyRelu: return leaky_relu(a);
    case Activation::kElu: return elu(a);
  }
  throw InvalidArgument("unknown activation");
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    if (p.rows() != rows) shape_fail("concat_cols", parts[0].value(), p.value());
    widths.push_back(p.cols());
    cols += p.cols();
  }
  Tensor y(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < rows; ++i) std::copy(v.row(i), v.row(i) + v.cols(), y.row(i) + off);
    off += v.cols();
  }
  return record(std::move(y), parts, [widths](const Tensor& g, std::span<Tensor* const> pg) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      if (pg[k])
        for (std::size_t i = 0; i < g.rows(); ++i) {
          double* dst = pg[k]->row(i);
          const double* src = g.row(i) + off;
          for (std::size_t j = 0; j < widths[k]; ++j) dst[j] += src[j];
        }
      off += widths[k];
    }
  });
}

Var slice_cols(const Var& a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.cols())
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) + ") outside " +
                     a.value().shape_str());
  const Tensor& A = a.value();
  Tensor y(A.rows(), end - begin);
  for (std::size_t i = 0; i < A.rows(); ++i) std::copy(A.row(i) + begin, A.row(i) + end, y.row(i));
  return record(std::move(y), {a}, [begin](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i) {
      double* dst = pg[0]->row(i) + begin;
      for (std::size_t j = 0; j < g.cols(); ++j) dst[j] += g(i, j);
    }
  });
}

Var pick(const Var& a, std::size_t r, std::size_t c) {
  if (r >= a.rows() || c >= a.cols())
    throw ShapeError("pick: (" + std::to_string(r) + "," + std::to_string(c) + ") outside " + a.value().shape_str());
  return record(Tensor::scalar(a.value()(r, c)), {a},
                [r, c](const Tensor& g, std::span<Tensor* const> pg) { (*pg[0])(r, c) += g[0]; });
}

Var reduce(const Var& a, Reduce op, Axis axis) {
  const Tensor& A = a.value();
  const std::size_t R = A.rows(), C = A.cols();
  std::size_t out_r = 1, out_c = 1;
  if (axis == Axis::kRows) out_c = C;
  if (axis == Axis::kCols) out_r = R;
  auto out_index = [axis](std::size_t i, std::size_t j) -> std::size_t {
    switch (axis) {
      case Axis::kAll: return 0;
      case Axis::kRows: return j;
      case Axis::kCols: return i;
    }
    return 0;
  };
  const std::size_t count = axis == Axis::kAll ? R * C : (axis == Axis::kRows ? R : C);
  if (count == 0 && op != Reduce::kSum) throw ShapeError("reduce: mean/max over an empty tensor");
  Tensor y(out_r, out_c, op == Reduce::kMax ? -std::numeric_limits<double>::infinity() : 0.0);
  std::vector<std::size_t> argmax;
  if (op == Reduce::kMax) argmax.assign(y.size(), 0);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      const std::size_t o = out_index(i, j);
      const double v = A(i, j);
      if (op == Reduce::kMax) {
        if (v > y[o]) {
          y[o] = v;
          argmax[o] = i * C + j;
        }
      } else {
        y[o] += v;
      }
    }
  if (op == Reduce::kMean)
    for (std::size_t o = 0; o < y.size(); ++o) y[o] /= static_cast<double>(count);
  return record(std::move(y), {a},
                [op, R, C, count, argmax = std::move(argmax), out_index](const Tensor& g, std::span<Tensor* const> pg) {
                  Tensor& ga = *pg[0];
                  if (op == Reduce::kMax) {
                    for (std::size_t o = 0; o < g.size(); ++o) ga[argmax[o]] += g[o];
                    return;
                  }
                  const double s = op == Reduce::kMean ? 1.0 / static_cast<double>(count) : 1.0;
                  for (std::size_t i = 0; i < R; ++i)
                    for (std::size_t j = 0; j < C; ++j) ga(i, j) += s * g[out_index(i, j)];
                });
}

Var sum(const Var& a) { return reduce(a, Reduce::kSum, Axis::kAll); }
Var mean(const Var& a) { return reduce(a, Reduce::kMean, Axis::kAll); }

Var softmax_rows(const Var& a) {
  const Tensor& A = a.value();
  Tensor y(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double* x = A.row(i);
    double* yr = y.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < A.cols(); ++j) mx = std::max(mx, x[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) s += (yr[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < A.cols(); ++j) yr[j] /= s;
  }
  Tensor yc = y;
  return record(std::move(y), {a}, [yc = std::move(yc)](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < g.cols(); ++j) dot += g(i, j) * yc(i, j);
      for (std::size_t j = 0; j < g.cols(); ++j) (*pg[0])(i, j) += yc(i, j) * (g(i, j) - dot);
    }
  });
}

Var batch_norm(const Var& a, double eps) {
  const Tensor& X = a.value();
  const std::size_t R = X.rows(), C = X.cols();
  if (R == 0) throw ShapeError("batch_norm: empty input");
  std::vector<double> mu(C, 0.0), inv_std(C, 0.0);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) mu[j] += X(i, j);
  for (auto& m : mu) m /= static_cast<double>(R);
  for (std::size_t j = 0; j < C; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < R; ++i) v += (X(i, j) - mu[j]) * (X(i, j) - mu[j]);
    inv_std[j] = 1.0 / std::sqrt(v / static_cast<double>(R) + eps);
  }
  Tensor y(R, C);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) y(i, j) = (X(i, j) - mu[j]) * inv_std[j];
  Tensor yc = y;
  return record(std::move(y), {a}, [yc = std::move(yc), inv_std, R, C](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t j = 0; j < C; ++j) {
      double gs = 0.0, gys = 0.0;
      for (std::size_t i = 0; i < R; ++i) {
        gs += g(i, j);
        gys += g(i, j) * yc(i, j);
      }
      const double inv_r = 1.0 / static_cast<double>(R);
      for (std::size_t i = 0; i < R; ++i)
        (*pg[0])(i, j) += inv_std[j] * (g(i, j) - inv_r * gs - yc(i, j) * inv_r * gys);
    }
  });
}

// ---- graph primitives ----------------------------------------------------

namespace {

Var gather_impl(const char* op, const Var& a, const CsrPtr& csr, const std::vector<std::uint32_t>& idx,
                std::size_t expected_rows) {
  if (a.rows() != expected_rows)
    throw ShapeError(std::string(op) + ": input has " + std::to_string(a.rows()) + " rows, index expects " +
                     std::to_string(expected_rows));
  const Tensor& A = a.value();
  const std::size_t d = A.cols();
  Tensor y(idx.size(), d);
  for (std::size_t e = 0; e < idx.size(); ++e) std::copy(A.row(idx[e]), A.row(idx[e]) + d, y.row(e));
  return record(std::move(y), {a}, [csr, &idx, d](const Tensor& g, std::span<Tensor* const> pg) {
    const auto& kt = simd::kernels();
    for (std::size_t e = 0; e < idx.size(); ++e) kt.axpy(d, 1.0, g.row(e), pg[0]->row(idx[e]));
  });
}

}  // namespace

Var gather_src(const Var& a, const CsrPtr& csr) {
  return gather_impl("gather_src", a, csr, csr->src, csr->num_sources);
}

Var gather_dst(const Var& a, const CsrPtr& csr) {
  return gather_impl("gather_dst", a, csr, csr->dst, csr->num_segments);
}

Var segment_sum(const Var& e, const CsrPtr& csr) {
  check_segments("segment_sum", e, csr);
  const Tensor& E = e.value();
  const std::size_t d = E.cols();
  Tensor y(csr->num_segments, d);
  const auto& kt = simd::kernels();
  for (std::size_t s = 0; s < csr->num_segments; ++s)
    for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k) kt.axpy(d, 1.0, E.row(k), y.row(s));
  return record(std::move(y), {e}, [csr, d](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t s = 0; s < csr->num_segments; ++s)
      for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k) {
        double* dst = pg[0]->row(k);
        const double* src = g.row(s);
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      }
  });
}

Var segment_mean(const Var& e, const CsrPtr& csr) {
  check_segments("segment_mean", e, csr);
  const Tensor& E = e.value();
  const std::size_t d = E.cols();
  Tensor y(csr->num_segments, d);
  const auto& kt = simd::kernels();
  for (std::size_t s = 0; s < csr->num_segments; ++s) {
    const std::size_t cnt = csr->segment_size(s);
    if (cnt == 0) continue;
    const double inv = 1.0 / static_cast<double>(cnt);
    for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k) kt.axpy(d, inv, E.row(k), y.row(s));
  }
  return record(std::move(y), {e}, [csr, d](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t s = 0; s < csr->num_segments; ++s) {
      const std::size_t cnt = csr->segment_size(s);
      if (cnt == 0) continue;
      const double inv = 1.0 / static_cast<double>(cnt);
      for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k) {
        double* dst = pg[0]->row(k);
        const double* src = g.row(s);
        for (std::size_t j = 0; j < d; ++j) dst[j] += inv * src[j];
      }
    }
  });
}

Var segment_max(const Var& e, const CsrPtr& csr) {
  check_segments("segment_max", e, csr);
  const Tensor& E = e.value();
  const std::size_t d = E.cols();
  Tensor y(csr->num_segments, d);
  // arg[s*d + j] = winning entry, or SIZE_MAX for empty segments.
  std::vector<std::size_t> arg(csr->num_segments * d, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < csr->num_segments; ++s) {
    const std::size_t b = csr->offsets[s], en = csr->offsets[s + 1];
    if (b == en) continue;
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t best = b;
      for (std::size_t k = b + 1; k < en; ++k)
        if (E(k, j) > E(best, j)) best = k;
      y(s, j) = E(best, j);
      arg[s * d + j] = best;
    }
  }
  return record(std::move(y), {e}, [arg = std::move(arg), d](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t o = 0; o < arg.size(); ++o)
      if (arg[o] != static_cast<std::size_t>(-1)) (*pg[0])(arg[o], o % d) += g[o];
  });
}

Var segment_softmax(const Var& e, const CsrPtr& csr) {
  check_segments("segment_softmax", e, csr);
  const Tensor& E = e.value();
  const std::size_t h = E.cols();
  Tensor y(E.rows(), h);
  for (std::size_t s = 0; s < csr->num_segments; ++s) {
    const std::size_t b = csr->offsets[s], en = csr->offsets[s + 1];
    if (b == en) continue;
    for (std::size_t j = 0; j < h; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = b; k < en; ++k) mx = std::max(mx, E(k, j));
      double tot = 0.0;
      for (std::size_t k = b; k < en; ++k) tot += (y(k, j) = std::exp(E(k, j) - mx));
      for (std::size_t k = b; k < en; ++k) y(k, j) /= tot;
    }
  }
  Tensor yc = y;
  return record(std::move(y), {e}, [yc = std::move(yc), csr, h](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t s = 0; s < csr->num_segments; ++s) {
      const std::size_t b = csr->offsets[s], en = csr->offsets[s + 1];
      for (std::size_t j = 0; j < h; ++j) {
        double dot = 0.0;
        for (std::size_t k = b; k < en; ++k) dot += g(k, j) * yc(k, j);
        for (std::size_t k = b; k < en; ++k) (*pg[0])(k, j) += yc(k, j) * (g(k, j) - dot);
      }
    }
  });
}

Var spmm(const CsrPtr& csr, const Var& x) {
  if (x.rows() != csr->num_sources)
    throw ShapeError("spmm: input has " + std::to_string(x.rows()) + " rows, adjacency has " +
                     std::to_string(csr->num_sources) + " sources");
  const Tensor& X = x.value();
  const std::size_t d = X.cols();
  Tensor y(csr->num_segments, d);
  const auto& kt = simd::kernels();
  for (std::size_t s = 0; s < csr->num_segments; ++s)
    for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k)
      kt.axpy(d, csr->weight[k], X.row(csr->src[k]), y.row(s));
  return record(std::move(y), {x}, [csr, d](const Tensor& g, std::span<Tensor* const> pg) {
    const auto& kt = simd::kernels();
    for (std::size_t s = 0; s < csr->num_segments; ++s)
      for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k)
        kt.axpy(d, csr->weight[k], g.row(s), pg[0]->row(csr->src[k]));
  });
}

Var spmm(const CsrPtr& csr, const Var& coef, const Var& x) {
  if (x.rows() != csr->num_sources)
    throw ShapeError("spmm: input has " + std::to_string(x.rows()) + " rows, adjacency has " +
                     std::to_string(csr->num_sources) + " sources");
  if (coef.rows() != csr->num_entries() || coef.cols() != 1)
    throw ShapeError("spmm: coefficient shape " + coef.value().shape_str() + " vs " +
                     std::to_string(csr->num_entries()) + "x1 entries");
  const Tensor& X = x.value();
  const Tensor& W = coef.value();
  const std::size_t d = X.cols();
  Tensor y(csr->num_segments, d);
  const auto& kt = simd::kernels();
  for (std::size_t s = 0; s < csr->num_segments; ++s)
    for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k)
      kt.axpy(d, csr->weight[k] * W[k], X.row(csr->src[k]), y.row(s));
  return record(std::move(y), {coef, x}, [csr, d, X, W](const Tensor& g, std::span<Tensor* const> pg) {
    const auto& kt = simd::kernels();
    for (std::size_t s = 0; s < csr->num_segments; ++s)
      for (std::size_t k = csr->offsets[s]; k < csr->offsets[s + 1]; ++k) {
        if (pg[0]) (*pg[0])[k] += csr->weight[k] * kt.dot(d, g.row(s), X.row(csr->src[k]));
        if (pg[1]) kt.axpy(d, csr->weight[k] * W[k], g.row(s), pg[1]->row(csr->src[k]));
      }
  });
}

Var head_sum(const Var& a, std::size_t heads) {
  if (heads == 0 || a.cols() % heads != 0)
    throw ShapeError("head_sum: width " + std::to_string(a.cols()) + " not divisible by " + std::to_string(heads) +
                     " heads");
  const Tensor& A = a.value();
  const std::size_t chunk = A.cols() / heads;
  Tensor y(A.rows(), heads);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t h = 0; h < heads; ++h) {
      double s = 0.0;
      for (std::size_t c = 0; c < chunk; ++c) s += A(i, h * chunk + c);
      y(i, h) = s;
    }
  return record(std::move(y), {a}, [chunk, heads](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t h = 0; h < heads; ++h)
        for (std::size_t c = 0; c < chunk; ++c) (*pg[0])(i, h * chunk + c) += g(i, h);
  });
}

Var head_expand(const Var& a, std::size_t width) {
  const std::size_t heads = a.cols();
  if (heads == 0 || width % heads != 0)
    throw ShapeError("head_expand: width " + std::to_string(width) + " not divisible by " + std::to_string(heads) +
                     " heads");
  const Tensor& A = a.value();
  const std::size_t chunk = width / heads;
  Tensor y(A.rows(), width);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t h = 0; h < heads; ++h)
      for (std::size_t c = 0; c < chunk; ++c) y(i, h * chunk + c) = A(i, h);
  return record(std::move(y), {a}, [chunk, heads](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t h = 0; h < heads; ++h) {
        double s = 0.0;
        for (std::size_t c = 0; c < chunk; ++c) s += g(i, h * chunk + c);
        (*pg[0])(i, h) += s;
      }
  });
}

Var pad_segments(const Var& e, const CsrPtr& csr, std::size_t slots) {
  check_segments("pad_segments", e, csr);
  const Tensor& E = e.value();
  const std::size_t d = E.cols();
  Tensor y(csr->num_segments, slots * d);
  for (std::size_t s = 0; s < csr->num_segments; ++s) {
    const std::size_t cnt = std::min(csr->segment_size(s), slots);
    for (std::size_t k = 0; k < cnt; ++k) {
      const double* src = E.row(csr->offsets[s] + k);
      std::copy(src, src + d, y.row(s) + k * d);
    }
  }
  return record(std::move(y), {e}, [csr, slots, d](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t s = 0; s < csr->num_segments; ++s) {
      const std::size_t cnt = std::min(csr->segment_size(s), slots);
      for (std::size_t k = 0; k < cnt; ++k) {
        double* dst = pg[0]->row(csr->offsets[s] + k);
        const double* src = g.row(s) + k * d;
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      }
    }
  });
}

Var segment_position(const Var& e, const CsrPtr& csr, std::size_t position) {
  check_segments("segment_position", e, csr);
  const Tensor& E = e.value();
  const std::size_t d = E.cols();
  Tensor y(csr->num_segments, d);
  for (std::size_t s = 0; s < csr->num_segments; ++s)
    if (position < csr->segment_size(s)) {
      const double* src = E.row(csr->offsets[s] + position);
      std::copy(src, src + d, y.row(s));
    }
  return record(std::move(y), {e}, [csr, position, d](const Tensor& g, std::span<Tensor* const> pg) {
    for (std::size_t s = 0; s < csr->num_segments; ++s)
      if (position < csr->segment_size(s)) {
        double* dst = pg[0]->row(csr->offsets[s] + position);
        for (std::size_t j = 0; j < d; ++j) dst[j] += g(s, j);
      }
  });
}

}  // namespace qnas::ad
