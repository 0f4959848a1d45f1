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
#include <iosfwd>
#include <string>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/seqlm/model.hpp"
#include "trajmem/vqmem/model.hpp"

namespace trajmem::eval {

struct BenchConfig {
  std::size_t trials = 200;
  std::size_t warmup = 20;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
};

struct LatencyReport {
  std::size_t trials = 0;
  std::size_t samples = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  std::string model;
  std::string hardware;
};

// Times predict() on single trajectories drawn round-robin from `inputs`.
// Excludes all file and dataset handling.
LatencyReport latency_bench(const vqmem::VQParams<float>& vq,
                            const seqlm::LMParams<float>& lm,
                            const data::Dataset& inputs,
                            const BenchConfig& config);

// Nearest-rank percentile of an unsorted sample, q in (0, 1].
double percentile(std::vector<double> values, double q);

void write_latency_text(std::ostream& out, const LatencyReport& report);

}  // namespace trajmem::eval
