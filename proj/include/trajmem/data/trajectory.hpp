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
#include <stdexcept>
#include <string>
#include <vector>

namespace trajmem::data {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr std::size_t kDefaultObserved = 8;
inline constexpr std::size_t kDefaultPredicted = 12;

// One agent's track: `observed` past frames followed by `predicted` future
// frames, in scene units.
struct Trajectory {
  std::int32_t agent_id = 0;
  std::vector<Point> points;
  std::size_t observed = kDefaultObserved;
  std::size_t predicted = kDefaultPredicted;
  // Synthetic pattern id, -1 for ingested data.
  std::int32_t label = -1;

  std::size_t length() const { return points.size(); }
  std::span<const Point> past() const {
    return std::span<const Point>(points).first(observed);
  }
  std::span<const Point> future() const {
    return std::span<const Point>(points).subspan(observed, predicted);
  }
  // Throws std::invalid_argument when points.size() != observed + predicted.
  void validate() const;
};

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

const char* split_name(Split split);

struct Dataset {
  Split split = Split::kTrain;
  std::size_t observed = kDefaultObserved;
  std::size_t predicted = kDefaultPredicted;
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  // Every trajectory shares (observed, predicted); when `window` > 0 the
  // total length must also be a multiple of it.
  void validate(std::size_t window = 0) const;
};

}  // namespace trajmem::data
