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

#include "trajmem/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trajmem::eval {

namespace {

void check_pair(std::span<const data::Point> pred,
                std::span<const data::Point> gt) {
  if (pred.empty() || pred.size() != gt.size()) {
    throw std::invalid_argument("metric needs equal non-empty lengths, got " +
                                std::to_string(pred.size()) + " and " +
                                std::to_string(gt.size()));
  }
}

double distance(const data::Point& a, const data::Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

double ade(std::span<const data::Point> pred, std::span<const data::Point> gt) {
  check_pair(pred, gt);
  double total = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) total += distance(pred[t], gt[t]);
  return total / static_cast<double>(pred.size());
}

double fde(std::span<const data::Point> pred, std::span<const data::Point> gt) {
  check_pair(pred, gt);
  return distance(pred.back(), gt.back());
}

BestOfK best_of_k(const std::vector<std::vector<data::Point>>& samples,
                  std::span<const data::Point> gt) {
  if (samples.empty()) throw std::invalid_argument("best_of_k: no samples");
  BestOfK best;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double a = ade(samples[k], gt);
    const double f = fde(samples[k], gt);
    if (k == 0 || a < best.ade) {
      best.ade = a;
      best.ade_sample = k;
    }
    if (k == 0 || f < best.fde) {
      best.fde = f;
      best.fde_sample = k;
    }
  }
  return best;
}

std::vector<data::Point> constant_velocity_baseline(
    std::span<const data::Point> past, std::size_t predicted) {
  if (past.size() < 2) {
    throw std::invalid_argument("constant velocity needs >= 2 observed points");
  }
  const data::Point last = past.back();
  const double vx = last.x - past[past.size() - 2].x;
  const double vy = last.y - past[past.size() - 2].y;
  std::vector<data::Point> out(predicted);
  for (std::size_t t = 0; t < predicted; ++t) {
    const double steps = static_cast<double>(t + 1);
    out[t] = {last.x + steps * vx, last.y + steps * vy};
  }
  return out;
}

}  // namespace trajmem::eval
