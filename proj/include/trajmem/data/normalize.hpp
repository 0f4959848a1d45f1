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

#include <span>
#include <utility>
#include <vector>

#include "trajmem/data/trajectory.hpp"

namespace trajmem::data {

struct NormalizationTransform {
  Point offset;         // last observed point in scene coordinates
  double angle = 0.0;   // heading removed by the rotation, radians
  bool translated = false;
  bool rotated = false;
  // Rotation was requested but the final observed step had zero length.
  bool rotation_skipped = false;

  Point apply(Point p) const;
  Point invert(Point p) const;
};

// Moves the last observed point to the origin and, with `rotate`, turns the
// final observed velocity onto +x.
std::pair<Trajectory, NormalizationTransform> normalize(const Trajectory& traj,
                                                        bool rotate = false);

Trajectory denormalize(const Trajectory& traj,
                       const NormalizationTransform& transform);
std::vector<Point> denormalize(std::span<const Point> points,
                               const NormalizationTransform& transform);

}  // namespace trajmem::data
