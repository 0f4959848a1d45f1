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
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/seqlm/token_sequence.hpp"
#include "trajmem/vqmem/checkpoint.hpp"
#include "trajmem/vqmem/model.hpp"

namespace trajmem::vqmem {

// Raised when a loss turns non-finite; what() names the epoch and step.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VQTrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  double learning_rate = 1e-2;
  // Anneals the rate from learning_rate to 0 over all steps.
  bool cosine_decay = true;
  // Entries unassigned for this many consecutive steps are re-seeded.
  std::size_t dead_after = 100;
  std::uint64_t seed = 0;
};

struct VQEpochStats {
  std::size_t epoch = 0;
  double reconstruction = 0;
  double codebook = 0;
  double commitment = 0;
  double total = 0;
  double utilization = 0;  // fraction of entries assigned during the epoch
  std::size_t reseeded = 0;
};

struct VQTrainResult {
  std::vector<VQEpochStats> curve;
  std::int64_t steps = 0;
};

// Half-cosine annealing: base at step 0, 0 at step == total.
double cosine_rate(double base, std::int64_t step, std::int64_t total);

std::vector<data::Trajectory> normalize_all(const data::Dataset& dataset,
                                            bool rotate);

// Trains in place. Trajectories are normalized internally according to
// params.config.rotate.
VQTrainResult train_vq(
    VQParams<float>& params, const data::Dataset& train,
    const VQTrainConfig& config,
    const std::function<void(const VQEpochStats&)>& on_epoch = {});

struct CodebookReport {
  std::size_t entries = 0;
  std::size_t used = 0;
  double utilization = 0;
  double perplexity = 0;  // exp of the code entropy in nats
  std::vector<std::int64_t> histogram;
};

CodebookReport codebook_report(std::size_t entries,
                               std::span<const std::int32_t> indices);
CodebookReport codebook_report(const VQParams<float>& params,
                               const data::Dataset& dataset);

std::vector<seqlm::TokenSequence> tokenize_dataset(
    const VQParams<float>& params, const data::Dataset& dataset);

// Mean over trajectories of the average point displacement between each
// trajectory and its quantized reconstruction, in scene units.
double reconstruction_ade(const VQParams<float>& params,
                          const data::Dataset& dataset);

Checkpoint vq_checkpoint(const VQParams<float>& params);
VQParams<float> vq_from_checkpoint(const Checkpoint& ckpt);
// Memory entries alone, kind "codebook".
Checkpoint codebook_checkpoint(const MemoryArray<float>& memory);

}  // namespace trajmem::vqmem
