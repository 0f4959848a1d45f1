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
#include <span>
#include <vector>

#include "trajmem/data/trajectory.hpp"

namespace trajmem::eval {

// Mean Euclidean displacement over all frames. Throws std::invalid_argument
// on empty input or a length mismatch.
double ade(std::span<const data::Point> pred, std::span<const data::Point> gt);
// Euclidean displacement at the final frame.
double fde(std::span<const data::Point> pred, std::span<const data::Point> gt);

struct BestOfK {
  double ade = 0;
  double fde = 0;
  // The two minima are taken independently and may come from different
  // samples.
  std::size_t ade_sample = 0;
  std::size_t fde_sample = 0;
};

BestOfK best_of_k(const std::vector<std::vector<data::Point>>& samples,
                  std::span<const data::Point> gt);

// Repeats the final observed step `predicted` times. Needs >= 2 points.
std::vector<data::Point> constant_velocity_baseline(
    std::span<const data::Point> past, std::size_t predicted);

}  // namespace trajmem::eval
