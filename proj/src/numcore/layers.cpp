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

#include "trajmem/numcore/layers.hpp"

#include <cmath>

namespace trajmem::nc {

template <typename T>
Linear<T> Linear<T>::init(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  return Linear{uniform_tensor<T>({in, out}, bound, rng),
                Tensor<T>::zeros({out}, true)};
}

template <typename T>
Tensor<T> Linear<T>::operator()(const Tensor<T>& x) const {
  return add_bias(matmul(x, weight), bias);
}

template <typename T>
void Linear<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

template <typename T>
LayerNorm<T> LayerNorm<T>::init(std::size_t d) {
  return LayerNorm{Tensor<T>::full({d}, T(1), true),
                   Tensor<T>::zeros({d}, true)};
}

template <typename T>
Tensor<T> LayerNorm<T>::operator()(const Tensor<T>& x) const {
  return layernorm(x, gain, bias);
}

template <typename T>
void LayerNorm<T>::collect(const std::string& prefix,
                           NamedTensors<T>& out) const {
  out.emplace_back(prefix + ".gain", gain);
  out.emplace_back(prefix + ".bias", bias);
}

template <typename T>
SelfAttention<T> SelfAttention<T>::init(std::size_t d, std::size_t heads,
                                        Rng& rng) {
  if (heads == 0 || d % heads != 0) {
    throw ContractError("attention width " + std::to_string(d) +
                        " not divisible by " + std::to_string(heads) +
                        " heads");
  }
  SelfAttention a;
  a.query = Linear<T>::init(d, d, rng);
  a.key = Linear<T>::init(d, d, rng);
  a.value = Linear<T>::init(d, d, rng);
  a.output = Linear<T>::init(d, d, rng);
  a.heads = heads;
  return a;
}

template <typename T>
Tensor<T> SelfAttention<T>::operator()(const Tensor<T>& x, std::size_t batch,
                                       std::size_t steps,
                                       const AttentionMask& mask,
                                       Tensor<T>* weights) const {
  const std::size_t d = width();
  const std::size_t head_dim = d / heads;
  if (x.rank() != 2 || x.dim(0) != batch * steps || x.dim(1) != d) {
    throw ContractError("attention input " + shape_str(x.shape()) +
                        " does not match batch=" + std::to_string(batch) +
                        " steps=" + std::to_string(steps));
  }
  auto split = [&](const Tensor<T>& t) {
    return reshape(swap_axes12(reshape(t, {batch, steps, heads, head_dim})),
                   {batch * heads, steps, head_dim});
  };
  Tensor<T> q = split(query(x));
  Tensor<T> k = split(key(x));
  Tensor<T> v = split(value(x));
  Tensor<T> scores = scale(bmm(q, k, /*transpose_b=*/true),
                           static_cast<T>(1.0 / std::sqrt(double(head_dim))));
  Tensor<T> attn = masked_softmax(scores, mask);
  if (weights != nullptr) *weights = attn;
  Tensor<T> ctx = bmm(attn, v);
  ctx = reshape(swap_axes12(reshape(ctx, {batch, heads, steps, head_dim})),
                {batch * steps, d});
  return output(ctx);
}

template <typename T>
void SelfAttention<T>::collect(const std::string& prefix,
                               NamedTensors<T>& out) const {
  query.collect(prefix + ".query", out);
  key.collect(prefix + ".key", out);
  value.collect(prefix + ".value", out);
  output.collect(prefix + ".output", out);
}

template struct Linear<float>;
template struct Linear<double>;
template struct LayerNorm<float>;
template struct LayerNorm<double>;
template struct SelfAttention<float>;
template struct SelfAttention<double>;

}  // namespace trajmem::nc
