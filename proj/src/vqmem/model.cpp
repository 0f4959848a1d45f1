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

#include "trajmem/vqmem/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/tape.hpp"

namespace trajmem::vqmem {

using nc::Tensor;

void VQConfig::validate() const {
  if (codebook_size < 2) {
    throw std::invalid_argument("codebook size must be at least 2");
  }
  if (entry_dim == 0 || hidden == 0 || window == 0) {
    throw std::invalid_argument("entry_dim, hidden and window must be > 0");
  }
  if (observed == 0 || predicted == 0 || observed % window != 0 ||
      predicted % window != 0) {
    throw std::invalid_argument(
        "window " + std::to_string(window) + " must divide observed " +
        std::to_string(observed) + " and predicted " +
        std::to_string(predicted));
  }
  if (!(beta >= 0)) throw std::invalid_argument("beta must be >= 0");
}

template <typename T>
MemoryArray<T> MemoryArray<T>::init(std::size_t size, std::size_t dim,
                                    nc::Rng& rng) {
  MemoryArray m;
  m.entries = nc::uniform_tensor<T>({size, dim}, 0.1, rng);
  m.usage_counts.assign(size, 0);
  return m;
}

template <typename T>
void MemoryArray<T>::record_usage(std::span<const std::int32_t> indices) {
  if (usage_counts.size() != size()) usage_counts.assign(size(), 0);
  for (std::int32_t k : indices) ++usage_counts.at(static_cast<std::size_t>(k));
}

template <typename T>
void MemoryArray<T>::reset_usage() {
  usage_counts.assign(size(), 0);
}

template <typename T>
void MemoryArray<T>::validate() const {
  if (entries.rank() != 2 || size() < 2) {
    throw std::invalid_argument("memory array needs at least 2 entries");
  }
  for (T v : entries.data()) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("memory array holds a non-finite entry");
    }
  }
}

namespace {

// Row ids 0..windows-1 repeated for each trajectory in the batch.
std::vector<std::int32_t> position_ids(std::size_t batch,
                                       std::size_t windows) {
  std::vector<std::int32_t> ids(batch * windows);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = static_cast<std::int32_t>(i % windows);
  }
  return ids;
}

}  // namespace

template <typename T>
WindowEncoder<T> WindowEncoder<T>::init(const VQConfig& config,
                                        std::size_t windows, nc::Rng& rng) {
  WindowEncoder e;
  e.hidden = nc::Linear<T>::init(2 * config.window, config.hidden, rng);
  e.project = nc::Linear<T>::init(config.hidden, config.entry_dim, rng);
  e.position = nc::uniform_tensor<T>({windows, config.entry_dim}, 0.1, rng);
  e.attention = nc::SelfAttention<T>::init(config.entry_dim, 1, rng);
  return e;
}

template <typename T>
Tensor<T> WindowEncoder<T>::operator()(const Tensor<T>& windows_in,
                                       std::size_t batch) const {
  const std::size_t m = windows();
  if (windows_in.rank() != 2 || windows_in.dim(0) != batch * m ||
      windows_in.dim(1) != hidden.in_features()) {
    throw nc::ContractError("encoder expects [" + std::to_string(batch * m) +
                            ", " + std::to_string(hidden.in_features()) +
                            "], got " + nc::shape_str(windows_in.shape()));
  }
  const auto ids = position_ids(batch, m);
  Tensor<T> h = project(nc::relu(hidden(windows_in)));
  h = nc::add(h, nc::embedding_lookup(position, ids));
  return nc::add(h, attention(h, batch, m, nc::AttentionMask(m, m, true)));
}

template <typename T>
void WindowEncoder<T>::collect(const std::string& prefix,
                               nc::NamedTensors<T>& out) const {
  hidden.collect(prefix + "hidden", out);
  project.collect(prefix + "project", out);
  out.emplace_back(prefix + "position", position);
  attention.collect(prefix + "attention", out);
}

template <typename T>
WindowDecoder<T> WindowDecoder<T>::init(const VQConfig& config,
                                        std::size_t windows, nc::Rng& rng) {
  WindowDecoder d;
  d.position = nc::uniform_tensor<T>({windows, config.entry_dim}, 0.1, rng);
  d.attention = nc::SelfAttention<T>::init(config.entry_dim, 1, rng);
  d.hidden = nc::Linear<T>::init(config.entry_dim, config.hidden, rng);
  d.project = nc::Linear<T>::init(config.hidden, 2 * config.window, rng);
  return d;
}

template <typename T>
Tensor<T> WindowDecoder<T>::operator()(const Tensor<T>& codes,
                                       std::size_t batch) const {
  const std::size_t m = windows();
  if (codes.rank() != 2 || codes.dim(0) != batch * m ||
      codes.dim(1) != position.dim(1)) {
    throw nc::ContractError("decoder expects [" + std::to_string(batch * m) +
                            ", " + std::to_string(position.dim(1)) +
                            "], got " + nc::shape_str(codes.shape()));
  }
  const auto ids = position_ids(batch, m);
  Tensor<T> h = nc::add(codes, nc::embedding_lookup(position, ids));
  h = nc::add(h, attention(h, batch, m, nc::AttentionMask(m, m, true)));
  return project(nc::relu(hidden(h)));
}

template <typename T>
void WindowDecoder<T>::collect(const std::string& prefix,
                               nc::NamedTensors<T>& out) const {
  out.emplace_back(prefix + "position", position);
  attention.collect(prefix + "attention", out);
  hidden.collect(prefix + "hidden", out);
  project.collect(prefix + "project", out);
}

template <typename T>
VQParams<T> VQParams<T>::init(const VQConfig& config, nc::Rng& rng) {
  config.validate();
  VQParams p;
  p.config = config;
  p.encoder_past = WindowEncoder<T>::init(config, config.observed_tokens(), rng);
  p.encoder_future =
      WindowEncoder<T>::init(config, config.future_tokens(), rng);
  p.decoder = WindowDecoder<T>::init(config, config.tokens(), rng);
  p.memory =
      MemoryArray<T>::init(config.codebook_size, config.entry_dim, rng);
  return p;
}

template <typename T>
nc::NamedTensors<T> VQParams<T>::named_parameters() const {
  nc::NamedTensors<T> out;
  encoder_past.collect("encoder_past.", out);
  encoder_future.collect("encoder_future.", out);
  decoder.collect("decoder.", out);
  out.emplace_back("memory.entries", memory.entries);
  return out;
}

template <typename T>
Tensor<T> window_rows(const Batch& batch, Segment which,
                      const VQConfig& config) {
  std::size_t start = 0, length = config.length();
  if (which == Segment::kPast) length = config.observed;
  if (which == Segment::kFuture) {
    start = config.observed;
    length = config.predicted;
  }
  if (length % config.window != 0) {
    throw nc::ContractError("segment length " + std::to_string(length) +
                            " not divisible by window " +
                            std::to_string(config.window));
  }
  if (batch.empty()) throw nc::ContractError("empty batch");
  std::vector<T> values;
  values.reserve(batch.size() * length * 2);
  for (const data::Trajectory* t : batch) {
    if (t->points.size() != config.length()) {
      throw nc::ContractError("trajectory has " +
                              std::to_string(t->points.size()) +
                              " points, model expects " +
                              std::to_string(config.length()));
    }
    for (std::size_t k = start; k < start + length; ++k) {
      values.push_back(static_cast<T>(t->points[k].x));
      values.push_back(static_cast<T>(t->points[k].y));
    }
  }
  return Tensor<T>::from(
      {batch.size() * length / config.window, 2 * config.window},
      std::move(values));
}

template <typename T>
Tensor<T> encode(const VQParams<T>& params, const Batch& batch,
                 Segment which) {
  const VQConfig& c = params.config;
  if (which == Segment::kPast) {
    return params.encoder_past(window_rows<T>(batch, which, c), batch.size());
  }
  if (which == Segment::kFuture) {
    return params.encoder_future(window_rows<T>(batch, which, c),
                                 batch.size());
  }
  const std::size_t b = batch.size();
  Tensor<T> past = nc::reshape(encode(params, batch, Segment::kPast),
                               {b, c.observed_tokens(), c.entry_dim});
  Tensor<T> future = nc::reshape(encode(params, batch, Segment::kFuture),
                                 {b, c.future_tokens(), c.entry_dim});
  return nc::reshape(nc::concat<T>({past, future}, 1),
                     {b * c.tokens(), c.entry_dim});
}

template <typename T>
Tensor<T> encode(const VQParams<T>& params, const data::Trajectory& traj,
                 Segment which) {
  return encode(params, Batch{&traj}, which);
}

template <typename T>
std::vector<std::int32_t> nearest_entries(const MemoryArray<T>& memory,
                                          const Tensor<T>& v_a) {
  const std::size_t k_count = memory.size(), d = memory.dim();
  if (v_a.rank() != 2 || v_a.dim(1) != d) {
    throw nc::ContractError("quantize expects [m, " + std::to_string(d) +
                            "], got " + nc::shape_str(v_a.shape()));
  }
  const auto e = memory.entries.data();
  const auto x = v_a.data();
  std::vector<std::int32_t> out(v_a.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T* row = x.data() + i * d;
    T best = std::numeric_limits<T>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const T* entry = e.data() + k * d;
      T dist = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const T diff = row[j] - entry[j];
        dist += diff * diff;
      }
      // Strict comparison keeps the lowest index on ties.
      if (dist < best) {
        best = dist;
        best_k = k;
      }
    }
    out[i] = static_cast<std::int32_t>(best_k);
  }
  return out;
}

template <typename T>
Quantized<T> quantize(const MemoryArray<T>& memory, const Tensor<T>& v_a) {
  Quantized<T> q;
  q.indices = nearest_entries(memory, v_a);
  q.v_q = nc::embedding_lookup(memory.entries, q.indices);
  return q;
}

template <typename T>
Tensor<T> decode(const VQParams<T>& params, const Tensor<T>& codes,
                 std::size_t batch) {
  const VQConfig& c = params.config;
  if (codes.rank() != 2 || codes.dim(0) != batch * c.tokens()) {
    throw nc::ContractError("decode expects " +
                            std::to_string(batch * c.tokens()) +
                            " code rows, got " + nc::shape_str(codes.shape()));
  }
  return nc::reshape(params.decoder(codes, batch), {batch * c.length(), 2});
}

template <typename T>
VQOutput<T> vq_losses(const VQParams<T>& params, const Batch& batch,
                      std::span<const std::int32_t> frozen) {
  const VQConfig& c = params.config;
  VQOutput<T> out;
  out.v_a = encode(params, batch, Segment::kBoth);
  if (frozen.empty()) {
    out.indices = nearest_entries(params.memory, out.v_a);
  } else {
    if (frozen.size() != out.v_a.dim(0)) {
      throw nc::ContractError("frozen assignment has " +
                              std::to_string(frozen.size()) + " ids for " +
                              std::to_string(out.v_a.dim(0)) + " windows");
    }
    out.indices.assign(frozen.begin(), frozen.end());
  }
  out.v_q = nc::embedding_lookup(params.memory.entries, out.indices);
  out.reconstructed =
      decode(params, nc::straight_through(out.v_a, out.v_q), batch.size());
  out.reconstruction =
      nc::mse(out.reconstructed,
              nc::reshape(window_rows<T>(batch, Segment::kBoth, c),
                          {batch.size() * c.length(), 2}));
  out.codebook = nc::mse(nc::detach(out.v_a), out.v_q);
  out.commitment = nc::scale(nc::mse(out.v_a, nc::detach(out.v_q)),
                             static_cast<T>(c.beta));
  out.total = nc::add(nc::add(out.reconstruction, out.codebook),
                      out.commitment);
  return out;
}

template <typename T>
seqlm::TokenSequence tokenize(const VQParams<T>& params,
                              const data::Trajectory& normalized) {
  nc::NoGradGuard no_grad;
  seqlm::TokenSequence s;
  s.observed = params.config.observed_tokens();
  s.future = params.config.future_tokens();
  s.tokens = nearest_entries(params.memory,
                             encode(params, normalized, Segment::kBoth));
  return s;
}

namespace {

template <typename T>
std::vector<data::Point> to_points(const Tensor<T>& flat) {
  std::vector<data::Point> points(flat.dim(0));
  const auto v = flat.data();
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i] = {static_cast<double>(v[2 * i]),
                 static_cast<double>(v[2 * i + 1])};
  }
  return points;
}

}  // namespace

template <typename T>
std::vector<data::Point> decode_tokens(const VQParams<T>& params,
                                       std::span<const std::int32_t> tokens) {
  nc::NoGradGuard no_grad;
  for (std::int32_t t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= params.memory.size()) {
      throw nc::ContractError("token " + std::to_string(t) +
                              " outside memory array");
    }
  }
  return to_points(
      decode(params, nc::embedding_lookup(params.memory.entries, tokens), 1));
}

template <typename T>
std::vector<data::Point> reconstruct(const VQParams<T>& params,
                                     const data::Trajectory& normalized) {
  return decode_tokens(params, tokenize(params, normalized).tokens);
}

#define TRAJMEM_VQ_INSTANTIATE(T)                                            \
  template struct MemoryArray<T>;                                            \
  template struct WindowEncoder<T>;                                          \
  template struct WindowDecoder<T>;                                          \
  template struct VQParams<T>;                                               \
  template Tensor<T> window_rows<T>(const Batch&, Segment, const VQConfig&); \
  template Tensor<T> encode<T>(const VQParams<T>&, const Batch&, Segment);   \
  template Tensor<T> encode<T>(const VQParams<T>&, const data::Trajectory&,  \
                               Segment);                                     \
  template std::vector<std::int32_t> nearest_entries<T>(                     \
      const MemoryArray<T>&, const Tensor<T>&);                              \
  template Quantized<T> quantize<T>(const MemoryArray<T>&, const Tensor<T>&); \
  template Tensor<T> decode<T>(const VQParams<T>&, const Tensor<T>&,         \
                               std::size_t);                                 \
  template VQOutput<T> vq_losses<T>(const VQParams<T>&, const Batch&,        \
                                    std::span<const std::int32_t>);          \
  template seqlm::TokenSequence tokenize<T>(const VQParams<T>&,              \
                                            const data::Trajectory&);        \
  template std::vector<data::Point> reconstruct<T>(const VQParams<T>&,       \
                                                   const data::Trajectory&); \
  template std::vector<data::Point> decode_tokens<T>(                        \
      const VQParams<T>&, std::span<const std::int32_t>);

TRAJMEM_VQ_INSTANTIATE(float)
TRAJMEM_VQ_INSTANTIATE(double)

#undef TRAJMEM_VQ_INSTANTIATE

}  // namespace trajmem::vqmem
