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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trajmem/data/synth.hpp"
#include "trajmem/eval/report.hpp"
#include "trajmem/seqlm/train.hpp"
#include "trajmem/vqmem/train.hpp"

namespace trajmem::eval {

struct PipelineConfig {
  vqmem::VQConfig vq;
  vqmem::VQTrainConfig vq_train;
  // vocab, observed and future are taken from `vq`.
  seqlm::LMConfig lm;
  seqlm::LMTrainConfig lm_train;
  seqlm::SampleConfig sample;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

seqlm::LMConfig lm_config_for(const vqmem::VQConfig& vq,
                              seqlm::LMConfig base);

vqmem::VQParams<float> train_vq_stage(const data::Dataset& train,
                                      const PipelineConfig& config);
seqlm::LMTrainRecord train_lm_stage(const vqmem::VQParams<float>& vq,
                                    const data::SplitDatasets& splits,
                                    const PipelineConfig& config,
                                    seqlm::LMParams<float>& lm);

struct ThetaRow {
  std::size_t theta = 0;
  std::size_t storage_bytes = 0;
  double reconstruction_ade = 0;
  double prediction_ade = 0;
  double prediction_fde = 0;
  double utilization = 0;
  double perplexity = 0;
};

// Trains VQ and LM from scratch for every memory size at the same seed and
// scores them on the test split.
std::vector<ThetaRow> sweep_theta(const data::SplitDatasets& splits,
                                  const std::vector<std::size_t>& thetas,
                                  const PipelineConfig& config);

struct MaskRow {
  seqlm::MaskKind mask = seqlm::MaskKind::kSemiCausal;
  std::optional<std::int64_t> converged_at;
  std::int64_t iterations = 0;
  double best_val_loss = 0;
  double prediction_ade = 0;
  double prediction_fde = 0;
};

// Shares one trained VQ model; both language models start from the same
// initial weights and see the same batch order.
std::vector<MaskRow> compare_masks(const vqmem::VQParams<float>& vq,
                                   const data::SplitDatasets& splits,
                                   const PipelineConfig& config);

void write_theta_csv(std::ostream& out, const std::vector<ThetaRow>& rows);
void write_mask_csv(std::ostream& out, const std::vector<MaskRow>& rows);

}  // namespace trajmem::eval
