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

#include "qnas/ad/tensor.hpp"

#include <algorithm>

#include "qnas/error.hpp"
#include "qnas/simd/kernels.hpp"

namespace qnas::ad {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
}

std::string Tensor::shape_str() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add_scaled(const Tensor& other, double alpha) {
  if (!same_shape(other)) throw ShapeError("add_scaled: " + shape_str() + " vs " + other.shape_str());
  simd::kernels().axpy(data_.size(), alpha, other.data(), data_.data());
}

}  // namespace qnas::ad
