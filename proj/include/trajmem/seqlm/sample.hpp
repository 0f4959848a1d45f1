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
#include <vector>

#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/seqlm/model.hpp"

namespace trajmem::seqlm {

struct SampleConfig {
  std::size_t samples = 20;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on samples == 0 or temperature <= 0.
  void validate() const;
};

// Decodes one sequence position at a time with per-layer key/value caches.
// Works directly on parameter values (no tape), so it also serves as an
// independent route to the logits computed by forward_logits.
template <typename T>
class IncrementalDecoder {
 public:
  explicit IncrementalDecoder(const LMParams<T>& params);

  // Runs the observed prefix; returns logits at its last position, which
  // score the first future token.
  std::vector<double> prefill(std::span<const std::int32_t> prefix);
  // Appends `token` at the next position and returns its logits.
  std::vector<double> step(std::int32_t token);

  std::size_t length() const { return length_; }

 private:
  std::vector<double> run(std::span<const std::int32_t> tokens);

  const LMParams<T>& params_;
  nc::AttentionMask mask_;
  std::size_t observed_ = 0;
  std::size_t length_ = 0;
  // keys_[layer][position * d + c]
  std::vector<std::vector<double>> keys_;
  std::vector<std::vector<double>> values_;
};

// Greedy continuation; `step_logits` (optional) receives the p logit rows
// that produced each choice.
template <typename T>
std::vector<std::int32_t> greedy_future(
    const LMParams<T>& params, std::span<const std::int32_t> observed,
    std::vector<std::vector<double>>* step_logits = nullptr);

// Categorical draw from softmax(logits / temperature).
std::int32_t sample_token(std::span<const double> logits, double temperature,
                          nc::Rng& rng);

// `samples` independent ancestral continuations of length p. Sample k uses
// the stream Rng(seed).fork(k), so results do not depend on call order.
template <typename T>
std::vector<std::vector<std::int32_t>> sample_future(
    const LMParams<T>& params, std::span<const std::int32_t> observed,
    const SampleConfig& config);

}  // namespace trajmem::seqlm
