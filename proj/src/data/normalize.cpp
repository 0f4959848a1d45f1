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

#include "trajmem/data/normalize.hpp"

#include <cmath>

namespace trajmem::data {

Point NormalizationTransform::apply(Point p) const {
  Point q{p.x - offset.x, p.y - offset.y};
  if (!rotated) return q;
  const double c = std::cos(-angle), s = std::sin(-angle);
  return {c * q.x - s * q.y, s * q.x + c * q.y};
}

Point NormalizationTransform::invert(Point p) const {
  Point q = p;
  if (rotated) {
    const double c = std::cos(angle), s = std::sin(angle);
    q = {c * p.x - s * p.y, s * p.x + c * p.y};
  }
  return {q.x + offset.x, q.y + offset.y};
}

std::pair<Trajectory, NormalizationTransform> normalize(const Trajectory& traj,
                                                        bool rotate) {
  traj.validate();
  NormalizationTransform t;
  if (traj.observed > 0) {
    t.offset = traj.points[traj.observed - 1];
    t.translated = true;
  }
  if (rotate) {
    if (traj.observed >= 2) {
      const Point a = traj.points[traj.observed - 2];
      const Point b = traj.points[traj.observed - 1];
      const double dx = b.x - a.x, dy = b.y - a.y;
      if (dx != 0.0 || dy != 0.0) {
        t.angle = std::atan2(dy, dx);
        t.rotated = true;
      }
    }
    t.rotation_skipped = !t.rotated;
  }
  Trajectory out = traj;
  for (Point& p : out.points) p = t.apply(p);
  return {std::move(out), t};
}

std::vector<Point> denormalize(std::span<const Point> points,
                               const NormalizationTransform& transform) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(transform.invert(p));
  return out;
}

Trajectory denormalize(const Trajectory& traj,
                       const NormalizationTransform& transform) {
  Trajectory out = traj;
  out.points = denormalize(traj.points, transform);
  return out;
}

}  // namespace trajmem::data
