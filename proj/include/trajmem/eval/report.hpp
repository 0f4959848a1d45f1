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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "trajmem/data/trajectory.hpp"
#include "trajmem/eval/predict.hpp"

namespace trajmem::eval {

struct TrajectoryMetrics {
  std::size_t index = 0;
  double ade = 0;
  double fde = 0;
};

struct MetricsReport {
  std::vector<TrajectoryMetrics> rows;
  double mean_ade = 0;
  double mean_fde = 0;
  std::size_t samples = 0;
  // Echo of the settings that produced the report, in insertion order.
  std::vector<std::pair<std::string, std::string>> config;
};

// Fills the corpus means from `rows` (summed in index order).
MetricsReport summarize(std::vector<TrajectoryMetrics> rows,
                        std::size_t samples);

// Best-of-K metrics over a dataset. Trajectory i samples with
// trajectory_seed(config.seed, i), so the result does not depend on
// `threads`.
MetricsReport evaluate(const vqmem::VQParams<float>& vq,
                       const seqlm::LMParams<float>& lm,
                       const data::Dataset& dataset,
                       const seqlm::SampleConfig& config,
                       std::size_t threads = 1,
                       std::vector<Prediction>* predictions = nullptr);

MetricsReport evaluate_baseline(const data::Dataset& dataset);

// One row per trajectory then a "mean" row; fixed 9-digit precision.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
void write_metrics_text(std::ostream& out, const MetricsReport& report);

}  // namespace trajmem::eval
