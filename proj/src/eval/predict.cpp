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

#include "trajmem/eval/predict.hpp"

#include <stdexcept>
#include <string>

#include "trajmem/data/normalize.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/numcore/tape.hpp"

namespace trajmem::eval {

namespace {

// Copy of `traj` whose length satisfies the encoder; missing future frames
// repeat the last observed point and are never read.
data::Trajectory input_view(const data::Trajectory& traj) {
  if (traj.points.size() < traj.observed) {
    throw std::invalid_argument(
        "predict needs " + std::to_string(traj.observed) +
        " observed points, got " + std::to_string(traj.points.size()));
  }
  data::Trajectory view = traj;
  view.points.resize(traj.observed + traj.predicted, traj.points[traj.observed - 1]);
  return view;
}

// Decodes observed + each future token row in one batch and returns the
// future frames of every row in scene coordinates.
std::vector<std::vector<data::Point>> decode_futures(
    const vqmem::VQParams<float>& vq, std::span<const std::int32_t> observed,
    const std::vector<std::vector<std::int32_t>>& futures,
    const data::NormalizationTransform& transform) {
  const vqmem::VQConfig& c = vq.config;
  std::vector<std::int32_t> ids;
  ids.reserve(futures.size() * c.tokens());
  for (const auto& f : futures) {
    if (f.size() != c.future_tokens()) {
      throw std::invalid_argument("expected " + std::to_string(c.future_tokens()) +
                                  " future tokens, got " +
                                  std::to_string(f.size()));
    }
    ids.insert(ids.end(), observed.begin(), observed.end());
    ids.insert(ids.end(), f.begin(), f.end());
  }
  for (std::int32_t t : ids) {
    if (t < 0 || static_cast<std::size_t>(t) >= c.codebook_size) {
      throw std::invalid_argument("token " + std::to_string(t) +
                                  " outside memory array");
    }
  }
  nc::NoGradGuard no_grad;
  const auto flat = vqmem::decode(
      vq, nc::embedding_lookup(vq.memory.entries, std::span<const std::int32_t>(ids)),
      futures.size());
  const auto v = flat.data();
  const std::size_t length = c.length();
  std::vector<std::vector<data::Point>> out(futures.size());
  for (std::size_t s = 0; s < futures.size(); ++s) {
    std::vector<data::Point> points(c.predicted);
    for (std::size_t t = 0; t < c.predicted; ++t) {
      const std::size_t row = s * length + c.observed + t;
      points[t] = {static_cast<double>(v[2 * row]),
                   static_cast<double>(v[2 * row + 1])};
    }
    out[s] = data::denormalize(points, transform);
  }
  return out;
}

std::vector<std::int32_t> observed_tokens(const vqmem::VQParams<float>& vq,
                                          const data::Trajectory& normalized) {
  nc::NoGradGuard no_grad;
  return vqmem::nearest_entries(
      vq.memory, vqmem::encode(vq, normalized, vqmem::Segment::kPast));
}

}  // namespace

void check_compatible(const vqmem::VQParams<float>& vq,
                      const seqlm::LMParams<float>& lm) {
  const auto& v = vq.config;
  const auto& l = lm.config;
  if (l.vocab != v.codebook_size || l.observed != v.observed_tokens() ||
      l.future != v.future_tokens()) {
    throw std::invalid_argument(
        "language model (vocab " + std::to_string(l.vocab) + ", " +
        std::to_string(l.observed) + "+" + std::to_string(l.future) +
        " tokens) does not match memory array (" +
        std::to_string(v.codebook_size) + " entries, " +
        std::to_string(v.observed_tokens()) + "+" +
        std::to_string(v.future_tokens()) + " tokens)");
  }
}

Prediction predict(const vqmem::VQParams<float>& vq,
                   const seqlm::LMParams<float>& lm,
                   const data::Trajectory& traj,
                   const seqlm::SampleConfig& config) {
  check_compatible(vq, lm);
  const auto [normalized, transform] =
      data::normalize(input_view(traj), vq.config.rotate);
  const auto obs = observed_tokens(vq, normalized);
  Prediction out;
  out.futures = decode_futures(vq, obs, seqlm::sample_future(lm, obs, config),
                               transform);
  if (traj.points.size() >= traj.observed + traj.predicted) {
    const auto f = traj.future();
    out.truth.assign(f.begin(), f.end());
  }
  return out;
}

std::vector<data::Point> predict_with_tokens(
    const vqmem::VQParams<float>& vq, const data::Trajectory& traj,
    std::span<const std::int32_t> future_tokens) {
  const auto [normalized, transform] =
      data::normalize(input_view(traj), vq.config.rotate);
  const auto obs = observed_tokens(vq, normalized);
  return decode_futures(
      vq, obs, {std::vector<std::int32_t>(future_tokens.begin(), future_tokens.end())},
      transform)[0];
}

std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t index) {
  return nc::Rng(seed).fork(index).next_u64();
}

}  // namespace trajmem::eval
