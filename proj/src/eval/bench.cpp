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

#include "trajmem/eval/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "trajmem/eval/predict.hpp"

namespace trajmem::eval {

double percentile(std::vector<double> values, double q) {
  if (values.empty() || !(q > 0 && q <= 1)) {
    throw std::invalid_argument("percentile needs values and q in (0, 1]");
  }
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

LatencyReport latency_bench(const vqmem::VQParams<float>& vq,
                            const seqlm::LMParams<float>& lm,
                            const data::Dataset& inputs,
                            const BenchConfig& config) {
  if (inputs.empty() || config.trials == 0) {
    throw std::invalid_argument("latency_bench needs inputs and trials > 0");
  }
  seqlm::SampleConfig sample{config.samples, 1.0, config.seed};
  auto run = [&](std::size_t i) {
    sample.seed = trajectory_seed(config.seed, i);
    return predict(vq, lm, inputs.trajectories[i % inputs.size()], sample);
  };
  for (std::size_t i = 0; i < config.warmup; ++i) run(i);

  std::vector<double> ms;
  ms.reserve(config.trials);
  double checksum = 0;
  for (std::size_t i = 0; i < config.trials; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Prediction p = run(i);
    const auto stop = std::chrono::steady_clock::now();
    checksum += p.futures[0].back().x;
    ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  // Keeps the prediction observable so it cannot be optimized away.
  if (std::isnan(checksum)) throw std::runtime_error("non-finite prediction");

  LatencyReport report;
  report.trials = config.trials;
  report.samples = config.samples;
  for (double v : ms) report.mean_ms += v;
  report.mean_ms /= static_cast<double>(ms.size());
  report.p50_ms = percentile(ms, 0.5);
  report.p95_ms = percentile(ms, 0.95);
  const auto& l = lm.config;
  report.model = "memory " + std::to_string(vq.config.codebook_size) + "x" +
                 std::to_string(vq.config.entry_dim) + ", lm d_model " +
                 std::to_string(l.d_model) + " heads " +
                 std::to_string(l.heads) + " layers " +
                 std::to_string(l.layers);
  report.hardware = std::to_string(std::thread::hardware_concurrency()) +
                    " hardware threads, single-threaded timing";
  return report;
}

void write_latency_text(std::ostream& out, const LatencyReport& report) {
  out << "trials: " << report.trials << '\n'
      << "samples per prediction: " << report.samples << '\n'
      << "mean ms: " << report.mean_ms << '\n'
      << "p50 ms: " << report.p50_ms << '\n'
      << "p95 ms: " << report.p95_ms << '\n'
      << "model: " << report.model << '\n'
      << "hardware: " << report.hardware << '\n';
}

}  // namespace trajmem::eval
