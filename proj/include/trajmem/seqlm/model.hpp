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

#include "trajmem/numcore/layers.hpp"
#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/seqlm/token_sequence.hpp"

namespace trajmem::seqlm {

enum class MaskKind { kSemiCausal, kCausal };

const char* mask_name(MaskKind kind);
// Accepts "semi-causal" / "semi_causal" / "causal".
MaskKind parse_mask_kind(const std::string& name);

// Prefix-causal mask over s = o + p positions: observed keys (j < o) are
// visible to every query, future keys only to queries at or after them.
// Throws std::invalid_argument when o == 0.
nc::AttentionMask build_mask(std::size_t observed, std::size_t future);
// allowed(i, j) iff i >= j.
nc::AttentionMask build_causal_mask(std::size_t size);
nc::AttentionMask build_mask(MaskKind kind, std::size_t observed,
                             std::size_t future);

struct LMConfig {
  std::size_t vocab = 64;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t layers = 3;
  std::size_t ff = 128;
  std::size_t observed = 4;  // o
  std::size_t future = 6;    // p
  MaskKind mask = MaskKind::kSemiCausal;

  void validate() const;
  std::size_t max_length() const { return observed + future; }
};

// Pre-layernorm transformer block.
template <typename T>
struct Block {
  nc::LayerNorm<T> norm1;
  nc::SelfAttention<T> attention;
  nc::LayerNorm<T> norm2;
  nc::Linear<T> ff_in;
  nc::Linear<T> ff_out;

  void collect(const std::string& prefix, nc::NamedTensors<T>& out) const;
};

template <typename T>
struct LMParams {
  LMConfig config;
  nc::Tensor<T> token_embedding;  // [K, d_model]
  nc::Tensor<T> position;         // [o + p, d_model]
  std::vector<Block<T>> blocks;
  nc::LayerNorm<T> final_norm;
  nc::Linear<T> output;           // [d_model, K]

  static LMParams init(const LMConfig& config, nc::Rng& rng);
  nc::NamedTensors<T> named_parameters() const;

  template <typename U>
  LMParams<U> cast() const {
    nc::Rng scratch(0);
    auto out = LMParams<U>::init(config, scratch);
    auto dst = out.named_parameters();
    nc::copy_parameters(named_parameters(), dst);
    return out;
  }
};

// tokens holds `batch` sequences of mask.rows() ids back to back; returns
// logits [batch * steps, K]. When `attention` is non-null it receives one
// [batch * heads, steps, steps] weight tensor per block.
template <typename T>
nc::Tensor<T> forward_logits(const LMParams<T>& params,
                             std::span<const std::int32_t> tokens,
                             std::size_t batch, const nc::AttentionMask& mask,
                             std::vector<nc::Tensor<T>>* attention = nullptr);

// Single-sequence convenience using params.config.mask.
template <typename T>
nc::Tensor<T> forward_logits(const LMParams<T>& params,
                             std::span<const std::int32_t> tokens,
                             std::size_t observed);

// Teacher-forced cross-entropy on the future tokens only, averaged over the
// p predicted positions of every sequence. Inputs are tokens[0 .. o+p-2].
template <typename T>
nc::Tensor<T> lm_loss(const LMParams<T>& params,
                      const std::vector<const TokenSequence*>& batch);
template <typename T>
nc::Tensor<T> lm_loss(const LMParams<T>& params, const TokenSequence& seq);

// Sum of log p(s_t | s_<t) over the future tokens.
template <typename T>
double sequence_log_prob(const LMParams<T>& params, const TokenSequence& seq);

}  // namespace trajmem::seqlm
