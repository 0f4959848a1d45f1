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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "trajmem/seqlm/model.hpp"
#include "trajmem/seqlm/token_sequence.hpp"
#include "trajmem/vqmem/checkpoint.hpp"

namespace trajmem::seqlm {

class LMTrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LMTrainConfig {
  // Validation loss bottoms out within ~10 epochs on the synthetic corpus;
  // 30 leaves room for the plateau rule to fire.
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  // Validation loss is evaluated every `eval_every` iterations.
  std::size_t eval_every = 25;
  // Convergence: `patience` consecutive evaluations each improving the best
  // validation loss by less than `min_delta`.
  double min_delta = 1e-4;
  std::size_t patience = 20;
  bool stop_at_convergence = false;
  std::uint64_t seed = 0;
};

struct LMEpochStats {
  std::size_t epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
};

struct LMEvalPoint {
  std::int64_t iteration = 0;
  double val_loss = 0;
};

struct LMTrainRecord {
  std::vector<LMEpochStats> curve;
  std::vector<LMEvalPoint> evals;
  std::int64_t iterations = 0;
  // Iteration of the evaluation that opened the final plateau; empty when
  // the plateau rule never fired.
  std::optional<std::int64_t> converged_at;
};

// Mean teacher-forced loss over a token set, no gradient.
double mean_lm_loss(const LMParams<float>& params,
                    const std::vector<TokenSequence>& sequences,
                    std::size_t batch_size = 128);

// Trains in place. `val` may be empty, in which case the training batch loss
// stands in for the validation loss.
LMTrainRecord train_lm(
    LMParams<float>& params, const std::vector<TokenSequence>& train,
    const std::vector<TokenSequence>& val, const LMTrainConfig& config,
    const std::function<void(const LMEpochStats&)>& on_epoch = {});

// Plateau detector shared by train_lm and its tests.
class PlateauTracker {
 public:
  PlateauTracker(double min_delta, std::size_t patience)
      : min_delta_(min_delta), patience_(patience) {}

  // Returns true once `patience` consecutive stalled evaluations were seen.
  bool observe(std::int64_t iteration, double loss);
  std::optional<std::int64_t> plateau_start() const { return start_; }
  bool converged() const { return converged_; }

 private:
  double min_delta_;
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t stalled_ = 0;
  std::int64_t candidate_ = 0;
  std::optional<std::int64_t> start_;
  bool converged_ = false;
};

// Token file: "TMTK" | u8 version=1 | u32 K | u32 o | u32 p | u32 count |
// count * (o + p) u16 token ids, little-endian.
struct TokenFile {
  std::size_t vocab = 0;
  std::size_t observed = 0;
  std::size_t future = 0;
  std::vector<TokenSequence> sequences;
};

void write_tokens(std::ostream& out, const TokenFile& file);
TokenFile read_tokens(std::istream& in);
void save_tokens(const std::filesystem::path& path, const TokenFile& file);
TokenFile load_tokens(const std::filesystem::path& path);

vqmem::Checkpoint lm_checkpoint(const LMParams<float>& params);
LMParams<float> lm_from_checkpoint(const vqmem::Checkpoint& ckpt);

}  // namespace trajmem::seqlm
