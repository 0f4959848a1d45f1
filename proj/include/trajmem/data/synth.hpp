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

#include <array>
#include <cstddef>
#include <string_view>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/numcore/rng.hpp"

namespace trajmem::data {

enum class Pattern : int {
  kConstantVelocity = 0,
  kConstantAcceleration,
  kLeftTurn,
  kRightTurn,
  kWeave,
  kStopAndGo,
  kUTurn,
  kStationary,
};

inline constexpr std::size_t kPatternCount = 8;

std::string_view pattern_name(Pattern pattern);

// Mixture weights indexed by Pattern; must sum to 1.
using PatternMix = std::array<double, kPatternCount>;

PatternMix uniform_mix();
PatternMix single_pattern(Pattern pattern);

struct SynthConfig {
  std::size_t count = 4000;
  std::size_t observed = kDefaultObserved;
  std::size_t predicted = kDefaultPredicted;
  PatternMix mix = uniform_mix();
  double noise_sigma = 0.01;
  double speed_min = 0.1;
  double speed_max = 0.4;
  double start_extent = 10.0;  // start positions in [-extent, extent]^2
};

// Draws `config.count` labeled trajectories. Each one uses its own forked
// stream, so trajectory i is independent of how many others are drawn.
Dataset synth_generate(const nc::Rng& rng, const SynthConfig& config);

struct SplitSizes {
  std::size_t train = 3200;
  std::size_t val = 400;
  std::size_t test = 400;
};

struct SplitDatasets {
  Dataset train, val, test;
};

// Consecutive, disjoint partition of `all` in train/val/test order.
SplitDatasets split_dataset(const Dataset& all, const SplitSizes& sizes);

}  // namespace trajmem::data
