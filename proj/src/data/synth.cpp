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

#include "trajmem/data/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trajmem::data {

std::string_view pattern_name(Pattern pattern) {
  switch (pattern) {
    case Pattern::kConstantVelocity: return "constant_velocity";
    case Pattern::kConstantAcceleration: return "constant_acceleration";
    case Pattern::kLeftTurn: return "left_turn";
    case Pattern::kRightTurn: return "right_turn";
    case Pattern::kWeave: return "weave";
    case Pattern::kStopAndGo: return "stop_and_go";
    case Pattern::kUTurn: return "u_turn";
    case Pattern::kStationary: return "stationary";
  }
  return "unknown";
}

PatternMix uniform_mix() {
  PatternMix mix;
  mix.fill(1.0 / static_cast<double>(kPatternCount));
  return mix;
}

PatternMix single_pattern(Pattern pattern) {
  PatternMix mix{};
  mix[static_cast<std::size_t>(pattern)] = 1.0;
  return mix;
}

namespace {

constexpr double kPi = std::numbers::pi;

Pattern draw_pattern(nc::Rng& rng, const PatternMix& mix) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < kPatternCount; ++i) {
    acc += mix[i];
    if (u < acc) return static_cast<Pattern>(i);
  }
  // Rounding left u above the running total; take the last weighted entry.
  for (std::size_t i = kPatternCount; i-- > 0;) {
    if (mix[i] > 0.0) return static_cast<Pattern>(i);
  }
  return Pattern::kConstantVelocity;
}

// Per-frame speed and heading; position integrates them from the start point.
struct Motion {
  std::vector<double> speed;
  std::vector<double> heading;
};

Motion draw_motion(Pattern pattern, std::size_t steps, double v, double h0,
                   nc::Rng& rng) {
  Motion m{std::vector<double>(steps, v), std::vector<double>(steps, h0)};
  switch (pattern) {
    case Pattern::kConstantVelocity:
      break;
    case Pattern::kConstantAcceleration: {
      const double accel = v * rng.uniform(-0.04, 0.06);
      for (std::size_t t = 0; t < steps; ++t) {
        m.speed[t] = std::max(0.0, v + accel * static_cast<double>(t));
      }
      break;
    }
    case Pattern::kLeftTurn:
    case Pattern::kRightTurn: {
      const double sign = pattern == Pattern::kLeftTurn ? 1.0 : -1.0;
      const std::size_t onset = 2 + rng.below(13);
      const double rate = sign * rng.uniform(0.08, 0.2);
      for (std::size_t t = onset; t < steps; ++t) {
        m.heading[t] = h0 + rate * static_cast<double>(t - onset + 1);
      }
      break;
    }
    case Pattern::kWeave: {
      const double amplitude = rng.uniform(0.3, 0.6);
      const double period = rng.uniform(8.0, 14.0);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t t = 0; t < steps; ++t) {
        m.heading[t] = h0 + amplitude * std::sin(2.0 * kPi *
                                                     static_cast<double>(t) /
                                                     period +
                                                 phase);
      }
      break;
    }
    case Pattern::kStopAndGo: {
      const std::size_t stop = 3 + rng.below(8);
      const std::size_t duration = 3 + rng.below(5);
      for (std::size_t t = 0; t < steps; ++t) {
        if (t + 1 == stop || t == stop + duration) {
          m.speed[t] = 0.5 * v;
        } else if (t >= stop && t < stop + duration) {
          m.speed[t] = 0.0;
        }
      }
      break;
    }
    case Pattern::kUTurn: {
      const std::size_t onset = 3 + rng.below(8);
      const std::size_t span = 4 + rng.below(5);
      const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
      const double rate = sign * kPi / static_cast<double>(span);
      for (std::size_t t = onset; t < steps; ++t) {
        const std::size_t turned = std::min(t - onset + 1, span);
        m.heading[t] = h0 + rate * static_cast<double>(turned);
      }
      break;
    }
    case Pattern::kStationary:
      std::fill(m.speed.begin(), m.speed.end(), 0.0);
      break;
  }
  return m;
}

}  // namespace

Dataset synth_generate(const nc::Rng& rng, const SynthConfig& config) {
  double total = 0.0;
  for (double w : config.mix) {
    if (w < 0.0) throw std::invalid_argument("negative pattern weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("pattern weights must sum to 1");
  }
  const std::size_t length = config.observed + config.predicted;
  Dataset out;
  out.observed = config.observed;
  out.predicted = config.predicted;
  out.trajectories.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) {
    nc::Rng stream = rng.fork(i);
    const Pattern pattern = draw_pattern(stream, config.mix);
    const double x0 = stream.uniform(-config.start_extent, config.start_extent);
    const double y0 = stream.uniform(-config.start_extent, config.start_extent);
    const double speed = stream.uniform(config.speed_min, config.speed_max);
    const double heading = stream.uniform(0.0, 2.0 * kPi);
    const Motion motion = draw_motion(pattern, length, speed, heading, stream);

    Trajectory t;
    t.agent_id = static_cast<std::int32_t>(i);
    t.label = static_cast<std::int32_t>(pattern);
    t.observed = config.observed;
    t.predicted = config.predicted;
    t.points.resize(length);
    Point p{x0, y0};
    for (std::size_t k = 0; k < length; ++k) {
      t.points[k] = p;
      p.x += motion.speed[k] * std::cos(motion.heading[k]);
      p.y += motion.speed[k] * std::sin(motion.heading[k]);
    }
    if (pattern == Pattern::kStationary) {
      for (Point& q : t.points) {
        q.x += stream.normal(0.0, 0.03);
        q.y += stream.normal(0.0, 0.03);
      }
    }
    if (config.noise_sigma > 0.0) {
      for (Point& q : t.points) {
        q.x += stream.normal(0.0, config.noise_sigma);
        q.y += stream.normal(0.0, config.noise_sigma);
      }
    }
    out.trajectories.push_back(std::move(t));
  }
  return out;
}

SplitDatasets split_dataset(const Dataset& all, const SplitSizes& sizes) {
  if (sizes.train + sizes.val + sizes.test > all.size()) {
    throw std::invalid_argument("split sizes exceed dataset size " +
                                std::to_string(all.size()));
  }
  SplitDatasets out;
  auto take = [&](Dataset& d, Split split, std::size_t from, std::size_t n) {
    d.split = split;
    d.observed = all.observed;
    d.predicted = all.predicted;
    d.trajectories.assign(
        all.trajectories.begin() + static_cast<std::ptrdiff_t>(from),
        all.trajectories.begin() + static_cast<std::ptrdiff_t>(from + n));
  };
  take(out.train, Split::kTrain, 0, sizes.train);
  take(out.val, Split::kVal, sizes.train, sizes.val);
  take(out.test, Split::kTest, sizes.train + sizes.val, sizes.test);
  return out;
}

}  // namespace trajmem::data
