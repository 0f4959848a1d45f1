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

#include "trajmem/data/trajectory.hpp"

namespace trajmem::data {

void Trajectory::validate() const {
  if (points.size() != observed + predicted) {
    throw std::invalid_argument(
        "trajectory of agent " + std::to_string(agent_id) + " has " +
        std::to_string(points.size()) + " points, expected " +
        std::to_string(observed + predicted));
  }
}

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

void Dataset::validate(std::size_t window) const {
  if (window > 0 && ((observed % window) != 0 || (predicted % window) != 0)) {
    throw std::invalid_argument(
        "window " + std::to_string(window) + " must divide both observed (" +
        std::to_string(observed) + ") and predicted (" +
        std::to_string(predicted) + ") lengths");
  }
  for (const Trajectory& t : trajectories) {
    if (t.observed != observed || t.predicted != predicted) {
      throw std::invalid_argument("dataset mixes trajectory lengths");
    }
    t.validate();
  }
}

}  // namespace trajmem::data
