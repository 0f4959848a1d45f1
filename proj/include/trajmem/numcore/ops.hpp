/* Copyright 2026 The TrajMem Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "trajmem/numcore/tensor.hpp"

namespace trajmem::nc {

// Boolean attention mask, rows = queries, cols = keys.
class AttentionMask {
 public:
  AttentionMask() = default;
  AttentionMask(std::size_t rows, std::size_t cols, bool fill);

  static AttentionMask all_allowed(std::size_t rows, std::size_t cols) {
    return AttentionMask(rows, cols, true);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool allowed(std::size_t query, std::size_t key) const {
    return cells_[query * cols_ + key] != 0;
  }
  void set(std::size_t query, std::size_t key, bool allow) {
    cells_[query * cols_ + key] = allow ? 1 : 0;
  }
  std::size_t allowed_in_row(std::size_t query) const;

  friend bool operator==(const AttentionMask&, const AttentionMask&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Linear algebra.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> transpose(const Tensor<T>& a);
// [B,m,k] x [B,k,n] -> [B,m,n]; with transpose_b the right side is [B,n,k].
template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b = false);
// x[n,d] + bias[d] on every row.
template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias);

// Elementwise. Binary ops accept equal shapes or one single-element operand.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> relu(const Tensor<T>& x);
template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);

// Reductions to a single-element tensor.
template <typename T>
Tensor<T> sum(const Tensor<T>& x);
template <typename T>
Tensor<T> mean(const Tensor<T>& x);
// mean((a - b)^2)
template <typename T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b);

// Softmax over the last axis with blocked keys forced to exactly zero.
// The second-to-last axis indexes mask rows (rank-1 input uses row 0).
template <typename T>
Tensor<T> masked_softmax(const Tensor<T>& logits, const AttentionMask& mask);

// Normalizes the last axis, then applies gain and bias ([d] each).
template <typename T>
Tensor<T> layernorm(const Tensor<T>& x, const Tensor<T>& gain,
                    const Tensor<T>& bias, T eps = T(1e-5));

template <typename T>
Tensor<T> embedding_lookup(const Tensor<T>& table,
                           std::span<const std::int32_t> ids);

// Weighted mean of -log softmax(logits)[target] over rows.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits,
                        std::span<const std::int32_t> targets,
                        std::span<const std::type_identity_t<T>> weights);

// Layout.
template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);
// [A,B,C,D] -> [A,C,B,D]
template <typename T>
Tensor<T> swap_axes12(const Tensor<T>& x);
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);
template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start,
                std::size_t length);

// Gradient plumbing.
template <typename T>
Tensor<T> detach(const Tensor<T>& x);
// Forward value of `quantized`, gradient routed to `continuous` unchanged.
template <typename T>
Tensor<T> straight_through(const Tensor<T>& continuous,
                           const Tensor<T>& quantized);

}  // namespace trajmem::nc
