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
#include <string>
#include <vector>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/numcore/layers.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/seqlm/token_sequence.hpp"

namespace trajmem::vqmem {

enum class Segment { kPast, kFuture, kBoth };

struct VQConfig {
  std::size_t codebook_size = 64;  // K
  std::size_t entry_dim = 16;      // n_k
  std::size_t window = 2;          // frames per token
  std::size_t hidden = 64;
  std::size_t observed = data::kDefaultObserved;
  std::size_t predicted = data::kDefaultPredicted;
  double beta = 0.25;
  // Rotate trajectories so the last observed heading is +x before encoding.
  bool rotate = false;

  // Throws std::invalid_argument on K < 2, zero sizes, or a window that does
  // not divide both segment lengths.
  void validate() const;
  std::size_t observed_tokens() const { return observed / window; }
  std::size_t future_tokens() const { return predicted / window; }
  std::size_t tokens() const { return observed_tokens() + future_tokens(); }
  std::size_t length() const { return observed + predicted; }
};

template <typename T>
struct MemoryArray {
  nc::Tensor<T> entries;  // [K, n_k]
  std::vector<std::int64_t> usage_counts;

  // Entries uniform in [-0.1, 0.1].
  static MemoryArray init(std::size_t size, std::size_t dim, nc::Rng& rng);

  std::size_t size() const { return entries.dim(0); }
  std::size_t dim() const { return entries.dim(1); }
  // Accounting at 32-bit precision regardless of T.
  std::size_t storage_bytes() const { return size() * dim() * 4; }

  void record_usage(std::span<const std::int32_t> indices);
  void reset_usage();
  // Throws std::invalid_argument on K < 2 or a non-finite entry.
  void validate() const;
};

// Per-window MLP, learnable window position, then one residual
// self-attention layer across the windows of each trajectory.
template <typename T>
struct WindowEncoder {
  nc::Linear<T> hidden;
  nc::Linear<T> project;
  nc::Tensor<T> position;  // [windows, n_k]
  nc::SelfAttention<T> attention;

  static WindowEncoder init(const VQConfig& config, std::size_t windows,
                            nc::Rng& rng);
  std::size_t windows() const { return position.dim(0); }
  // windows_in[batch * windows, 2w] -> [batch * windows, n_k].
  nc::Tensor<T> operator()(const nc::Tensor<T>& windows_in,
                           std::size_t batch) const;
  void collect(const std::string& prefix, nc::NamedTensors<T>& out) const;
};

// Mirror image of the encoder: attention first, then the per-window MLP.
template <typename T>
struct WindowDecoder {
  nc::Tensor<T> position;  // [windows, n_k]
  nc::SelfAttention<T> attention;
  nc::Linear<T> hidden;
  nc::Linear<T> project;

  static WindowDecoder init(const VQConfig& config, std::size_t windows,
                            nc::Rng& rng);
  std::size_t windows() const { return position.dim(0); }
  // codes[batch * windows, n_k] -> [batch * windows, 2w].
  nc::Tensor<T> operator()(const nc::Tensor<T>& codes, std::size_t batch) const;
  void collect(const std::string& prefix, nc::NamedTensors<T>& out) const;
};

template <typename T>
struct VQParams {
  VQConfig config;
  WindowEncoder<T> encoder_past;
  WindowEncoder<T> encoder_future;
  WindowDecoder<T> decoder;
  MemoryArray<T> memory;

  static VQParams init(const VQConfig& config, nc::Rng& rng);

  // Handles share storage with the model. Memory entries come last.
  nc::NamedTensors<T> named_parameters() const;

  template <typename U>
  VQParams<U> cast() const {
    nc::Rng scratch(0);
    auto out = VQParams<U>::init(config, scratch);
    auto dst = out.named_parameters();
    nc::copy_parameters(named_parameters(), dst);
    out.memory.usage_counts = memory.usage_counts;
    return out;
  }
};

using Batch = std::vector<const data::Trajectory*>;

// Packs the chosen segment of each trajectory into [batch * m', 2w] rows of
// (x0, y0, x1, y1, ...) per window.
template <typename T>
nc::Tensor<T> window_rows(const Batch& batch, Segment which,
                          const VQConfig& config);

// Continuous encodings; rows are grouped per trajectory in batch order and,
// for kBoth, past windows precede future windows.
template <typename T>
nc::Tensor<T> encode(const VQParams<T>& params, const Batch& batch,
                     Segment which);
template <typename T>
nc::Tensor<T> encode(const VQParams<T>& params, const data::Trajectory& traj,
                     Segment which);

template <typename T>
struct Quantized {
  nc::Tensor<T> v_q;
  std::vector<std::int32_t> indices;
};

// Nearest entry by squared L2; lowest index wins exact ties.
template <typename T>
std::vector<std::int32_t> nearest_entries(const MemoryArray<T>& memory,
                                          const nc::Tensor<T>& v_a);
template <typename T>
Quantized<T> quantize(const MemoryArray<T>& memory, const nc::Tensor<T>& v_a);

// codes[batch * m, n_k] -> points[batch * T, 2].
template <typename T>
nc::Tensor<T> decode(const VQParams<T>& params, const nc::Tensor<T>& codes,
                     std::size_t batch);

template <typename T>
struct VQOutput {
  nc::Tensor<T> v_a;
  nc::Tensor<T> v_q;
  nc::Tensor<T> reconstructed;  // [batch * T, 2]
  std::vector<std::int32_t> indices;
  nc::Tensor<T> reconstruction;
  nc::Tensor<T> codebook;
  nc::Tensor<T> commitment;
  nc::Tensor<T> total;
};

// Squared-error terms are means over elements. A non-empty `frozen` fixes the
// assignments (one index per window), which keeps the loss smooth for
// finite-difference checks.
template <typename T>
VQOutput<T> vq_losses(const VQParams<T>& params, const Batch& batch,
                      std::span<const std::int32_t> frozen = {});

// Token ids of a normalized trajectory.
template <typename T>
seqlm::TokenSequence tokenize(const VQParams<T>& params,
                              const data::Trajectory& normalized);

// Decoded points of a normalized trajectory (through the quantizer).
template <typename T>
std::vector<data::Point> reconstruct(const VQParams<T>& params,
                                     const data::Trajectory& normalized);

// Decodes an index sequence of length m back into T points.
template <typename T>
std::vector<data::Point> decode_tokens(const VQParams<T>& params,
                                       std::span<const std::int32_t> tokens);

}  // namespace trajmem::vqmem
