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
#include <string>
#include <utility>
#include <vector>

#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/numcore/tensor.hpp"

namespace trajmem::nc {

template <typename T>
using NamedTensors = std::vector<std::pair<std::string, Tensor<T>>>;

// Copies values from `src` into `dst` matching by name; every destination
// entry must be present with an identical shape.
template <typename S, typename D>
void copy_parameters(const NamedTensors<S>& src, NamedTensors<D>& dst) {
  for (auto& [name, tensor] : dst) {
    bool found = false;
    for (const auto& [src_name, src_tensor] : src) {
      if (src_name != name) continue;
      if (src_tensor.shape() != tensor.shape()) {
        throw ContractError("parameter " + name + ": shape " +
                            shape_str(src_tensor.shape()) + " vs " +
                            shape_str(tensor.shape()));
      }
      auto out = tensor.data();
      auto in = src_tensor.data();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<D>(in[i]);
      found = true;
      break;
    }
    if (!found) throw ContractError("missing parameter " + name);
  }
}

template <typename T>
TensorList<T> tensors_of(const NamedTensors<T>& named) {
  TensorList<T> out;
  out.reserve(named.size());
  for (const auto& entry : named) out.push_back(entry.second);
  return out;
}

// Uniform(-bound, bound) fill.
template <typename T>
Tensor<T> uniform_tensor(Shape shape, double bound, Rng& rng) {
  std::vector<T> values(shape_numel(shape));
  for (T& v : values) v = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>::from(std::move(shape), std::move(values), true);
}

// x[n, in] -> x W + b.
template <typename T>
struct Linear {
  Tensor<T> weight;  // [in, out]
  Tensor<T> bias;    // [out]

  static Linear init(std::size_t in, std::size_t out, Rng& rng);

  std::size_t in_features() const { return weight.dim(0); }
  std::size_t out_features() const { return weight.dim(1); }
  Tensor<T> operator()(const Tensor<T>& x) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

template <typename T>
struct LayerNorm {
  Tensor<T> gain;
  Tensor<T> bias;

  static LayerNorm init(std::size_t d);
  Tensor<T> operator()(const Tensor<T>& x) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

// Multi-head self-attention over `batch` independent sequences stored as
// consecutive row blocks of x[batch * steps, d].
template <typename T>
struct SelfAttention {
  Linear<T> query, key, value, output;
  std::size_t heads = 1;

  static SelfAttention init(std::size_t d, std::size_t heads, Rng& rng);

  std::size_t width() const { return query.in_features(); }
  // When `weights` is non-null it receives the [batch*heads, steps, steps]
  // attention matrix.
  Tensor<T> operator()(const Tensor<T>& x, std::size_t batch,
                       std::size_t steps, const AttentionMask& mask,
                       Tensor<T>* weights = nullptr) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

}  // namespace trajmem::nc
