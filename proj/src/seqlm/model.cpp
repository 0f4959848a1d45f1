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

#include "trajmem/seqlm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "trajmem/numcore/tape.hpp"

namespace trajmem::seqlm {

using nc::Tensor;

const char* mask_name(MaskKind kind) {
  return kind == MaskKind::kCausal ? "causal" : "semi-causal";
}

MaskKind parse_mask_kind(const std::string& name) {
  if (name == "semi-causal" || name == "semi_causal") {
    return MaskKind::kSemiCausal;
  }
  if (name == "causal") return MaskKind::kCausal;
  throw std::invalid_argument("unknown mask kind '" + name +
                              "' (expected semi-causal or causal)");
}

nc::AttentionMask build_mask(std::size_t observed, std::size_t future) {
  if (observed == 0) {
    throw std::invalid_argument("semi-causal mask needs observed >= 1");
  }
  const std::size_t s = observed + future;
  nc::AttentionMask mask(s, s, false);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      mask.set(i, j, j < observed || i >= j);
    }
  }
  return mask;
}

nc::AttentionMask build_causal_mask(std::size_t size) {
  nc::AttentionMask mask(size, size, false);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j <= i; ++j) mask.set(i, j, true);
  }
  return mask;
}

nc::AttentionMask build_mask(MaskKind kind, std::size_t observed,
                             std::size_t future) {
  if (kind == MaskKind::kCausal) return build_causal_mask(observed + future);
  return build_mask(observed, future);
}

void LMConfig::validate() const {
  if (vocab < 2) throw std::invalid_argument("vocabulary must be >= 2");
  if (d_model == 0 || heads == 0 || d_model % heads != 0) {
    throw std::invalid_argument("d_model " + std::to_string(d_model) +
                                " must be divisible by heads " +
                                std::to_string(heads));
  }
  if (layers == 0 || ff == 0) {
    throw std::invalid_argument("layers and ff must be > 0");
  }
  if (observed == 0 || future == 0) {
    throw std::invalid_argument("observed and future token counts must be > 0");
  }
}

template <typename T>
void Block<T>::collect(const std::string& prefix,
                       nc::NamedTensors<T>& out) const {
  norm1.collect(prefix + "norm1", out);
  attention.collect(prefix + "attention", out);
  norm2.collect(prefix + "norm2", out);
  ff_in.collect(prefix + "ff_in", out);
  ff_out.collect(prefix + "ff_out", out);
}

template <typename T>
LMParams<T> LMParams<T>::init(const LMConfig& config, nc::Rng& rng) {
  config.validate();
  LMParams p;
  p.config = config;
  const std::size_t d = config.d_model;
  p.token_embedding = nc::uniform_tensor<T>({config.vocab, d}, 0.1, rng);
  p.position = nc::uniform_tensor<T>({config.max_length(), d}, 0.1, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    Block<T> b;
    b.norm1 = nc::LayerNorm<T>::init(d);
    b.attention = nc::SelfAttention<T>::init(d, config.heads, rng);
    b.norm2 = nc::LayerNorm<T>::init(d);
    b.ff_in = nc::Linear<T>::init(d, config.ff, rng);
    b.ff_out = nc::Linear<T>::init(config.ff, d, rng);
    p.blocks.push_back(std::move(b));
  }
  p.final_norm = nc::LayerNorm<T>::init(d);
  p.output = nc::Linear<T>::init(d, config.vocab, rng);
  return p;
}

template <typename T>
nc::NamedTensors<T> LMParams<T>::named_parameters() const {
  nc::NamedTensors<T> out;
  out.emplace_back("token_embedding", token_embedding);
  out.emplace_back("position", position);
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    blocks[l].collect("block" + std::to_string(l) + ".", out);
  }
  final_norm.collect("final_norm", out);
  output.collect("output", out);
  return out;
}

template <typename T>
Tensor<T> forward_logits(const LMParams<T>& params,
                         std::span<const std::int32_t> tokens,
                         std::size_t batch, const nc::AttentionMask& mask,
                         std::vector<Tensor<T>>* attention) {
  const std::size_t steps = mask.rows();
  if (mask.cols() != steps || steps == 0 ||
      steps > params.config.max_length()) {
    throw nc::ContractError("mask " + std::to_string(mask.rows()) + "x" +
                            std::to_string(mask.cols()) +
                            " unsupported for max length " +
                            std::to_string(params.config.max_length()));
  }
  if (tokens.size() != batch * steps) {
    throw nc::ContractError("forward_logits: " + std::to_string(tokens.size()) +
                            " tokens for " + std::to_string(batch) + " x " +
                            std::to_string(steps));
  }
  std::vector<std::int32_t> positions(tokens.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    positions[i] = static_cast<std::int32_t>(i % steps);
  }
  Tensor<T> x = nc::add(nc::embedding_lookup(params.token_embedding, tokens),
                        nc::embedding_lookup(params.position, positions));
  if (attention != nullptr) attention->clear();
  for (const Block<T>& b : params.blocks) {
    Tensor<T> weights;
    x = nc::add(x, b.attention(b.norm1(x), batch, steps, mask,
                               attention != nullptr ? &weights : nullptr));
    if (attention != nullptr) attention->push_back(weights);
    x = nc::add(x, b.ff_out(nc::relu(b.ff_in(b.norm2(x)))));
  }
  return params.output(params.final_norm(x));
}

template <typename T>
Tensor<T> forward_logits(const LMParams<T>& params,
                         std::span<const std::int32_t> tokens,
                         std::size_t observed) {
  if (tokens.size() < observed) {
    throw nc::ContractError("fewer tokens than observed prefix");
  }
  return forward_logits(
      params, tokens, 1,
      build_mask(params.config.mask, observed, tokens.size() - observed));
}

template <typename T>
Tensor<T> lm_loss(const LMParams<T>& params,
                  const std::vector<const TokenSequence*>& batch) {
  const LMConfig& c = params.config;
  if (batch.empty()) throw nc::ContractError("lm_loss: empty batch");
  const std::size_t o = c.observed, p = c.future;
  const std::size_t steps = o + p - 1;
  std::vector<std::int32_t> inputs, targets;
  std::vector<T> weights;
  inputs.reserve(batch.size() * steps);
  for (const TokenSequence* s : batch) {
    if (s->future == 0) throw std::invalid_argument("lm_loss: p must be >= 1");
    if (s->observed != o || s->future != p) {
      throw nc::ContractError("sequence shape " + std::to_string(s->observed) +
                              "+" + std::to_string(s->future) +
                              " does not match model " + std::to_string(o) +
                              "+" + std::to_string(p));
    }
    s->validate(c.vocab);
    for (std::size_t i = 0; i < steps; ++i) {
      inputs.push_back(s->tokens[i]);
      targets.push_back(s->tokens[i + 1]);
      // Row i predicts token i + 1; only future targets count.
      weights.push_back(i + 1 >= o ? T(1) : T(0));
    }
  }
  Tensor<T> logits = forward_logits(params, inputs, batch.size(),
                                    build_mask(c.mask, o, p - 1));
  return nc::cross_entropy<T>(logits, targets, weights);
}

template <typename T>
Tensor<T> lm_loss(const LMParams<T>& params, const TokenSequence& seq) {
  return lm_loss(params, std::vector<const TokenSequence*>{&seq});
}

template <typename T>
double sequence_log_prob(const LMParams<T>& params, const TokenSequence& seq) {
  nc::NoGradGuard no_grad;
  return -static_cast<double>(seq.future) *
         static_cast<double>(lm_loss(params, seq).item());
}

#define TRAJMEM_LM_INSTANTIATE(T)                                            \
  template struct Block<T>;                                                  \
  template struct LMParams<T>;                                               \
  template Tensor<T> forward_logits<T>(const LMParams<T>&,                   \
                                       std::span<const std::int32_t>,        \
                                       std::size_t, const nc::AttentionMask&, \
                                       std::vector<Tensor<T>>*);             \
  template Tensor<T> forward_logits<T>(                                      \
      const LMParams<T>&, std::span<const std::int32_t>, std::size_t);       \
  template Tensor<T> lm_loss<T>(const LMParams<T>&,                          \
                                const std::vector<const TokenSequence*>&);   \
  template Tensor<T> lm_loss<T>(const LMParams<T>&, const TokenSequence&);   \
  template double sequence_log_prob<T>(const LMParams<T>&,                   \
                                       const TokenSequence&);

TRAJMEM_LM_INSTANTIATE(float)
TRAJMEM_LM_INSTANTIATE(double)

#undef TRAJMEM_LM_INSTANTIATE

}  // namespace trajmem::seqlm
