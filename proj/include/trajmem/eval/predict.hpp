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

#include <cstdint>
#include <span>
#include <vector>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/seqlm/model.hpp"
#include "trajmem/seqlm/sample.hpp"
#include "trajmem/vqmem/model.hpp"

namespace trajmem::eval {

struct Prediction {
  // samples x predicted points, in scene coordinates.
  std::vector<std::vector<data::Point>> futures;
  // Ground-truth future when the input trajectory carried one, else empty.
  std::vector<data::Point> truth;
};

// Throws std::invalid_argument when the two models disagree on vocabulary
// or token counts.
void check_compatible(const vqmem::VQParams<float>& vq,
                      const seqlm::LMParams<float>& lm);

// normalize -> tokenize the observed windows -> sample future tokens ->
// decode each full sequence -> keep the future frames -> denormalize.
// Only the first `observed` points of `traj` are read as input.
Prediction predict(const vqmem::VQParams<float>& vq,
                   const seqlm::LMParams<float>& lm,
                   const data::Trajectory& traj,
                   const seqlm::SampleConfig& config);

// Same pipeline with the future tokens supplied instead of sampled.
std::vector<data::Point> predict_with_tokens(
    const vqmem::VQParams<float>& vq, const data::Trajectory& traj,
    std::span<const std::int32_t> future_tokens);

// Sampling seed of trajectory `index` within a run seeded by `seed`.
std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t index);

}  // namespace trajmem::eval
