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

#include "trajmem/eval/report.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "trajmem/eval/metrics.hpp"
#include "trajmem/eval/parallel.hpp"

namespace trajmem::eval {

namespace {

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace

MetricsReport summarize(std::vector<TrajectoryMetrics> rows,
                        std::size_t samples) {
  MetricsReport report;
  report.samples = samples;
  for (const auto& r : rows) {
    report.mean_ade += r.ade;
    report.mean_fde += r.fde;
  }
  if (!rows.empty()) {
    report.mean_ade /= static_cast<double>(rows.size());
    report.mean_fde /= static_cast<double>(rows.size());
  }
  report.rows = std::move(rows);
  return report;
}

MetricsReport evaluate(const vqmem::VQParams<float>& vq,
                       const seqlm::LMParams<float>& lm,
                       const data::Dataset& dataset,
                       const seqlm::SampleConfig& config,
                       std::size_t threads,
                       std::vector<Prediction>* predictions) {
  config.validate();
  check_compatible(vq, lm);
  const std::size_t n = dataset.size();
  std::vector<TrajectoryMetrics> rows(n);
  std::vector<Prediction> kept(predictions != nullptr ? n : 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& traj = dataset.trajectories[i];
    seqlm::SampleConfig local = config;
    local.seed = trajectory_seed(config.seed, i);
    Prediction p = predict(vq, lm, traj, local);
    const BestOfK best = best_of_k(p.futures, p.truth);
    rows[i] = {i, best.ade, best.fde};
    if (predictions != nullptr) kept[i] = std::move(p);
  });
  if (predictions != nullptr) *predictions = std::move(kept);
  MetricsReport report = summarize(std::move(rows), config.samples);
  report.config = {{"model", "trajmem"},
                   {"samples", std::to_string(config.samples)},
                   {"temperature", fixed9(config.temperature)},
                   {"seed", std::to_string(config.seed)},
                   {"trajectories", std::to_string(n)}};
  return report;
}

MetricsReport evaluate_baseline(const data::Dataset& dataset) {
  std::vector<TrajectoryMetrics> rows;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& t = dataset.trajectories[i];
    const auto pred = constant_velocity_baseline(t.past(), t.predicted);
    rows.push_back({i, ade(pred, t.future()), fde(pred, t.future())});
  }
  MetricsReport report = summarize(std::move(rows), 1);
  report.config = {{"model", "constant-velocity"},
                   {"trajectories", std::to_string(dataset.size())}};
  return report;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  out << "trajectory,ade,fde\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << fixed9(r.ade) << ',' << fixed9(r.fde) << '\n';
  }
  out << "mean," << fixed9(report.mean_ade) << ',' << fixed9(report.mean_fde)
      << '\n';
}

void write_metrics_text(std::ostream& out, const MetricsReport& report) {
  for (const auto& [key, value] : report.config) {
    out << key << ": " << value << '\n';
  }
  out << "best-of-" << report.samples << " ADE: " << fixed9(report.mean_ade)
      << '\n'
      << "best-of-" << report.samples << " FDE: " << fixed9(report.mean_fde)
      << '\n';
}

}  // namespace trajmem::eval
