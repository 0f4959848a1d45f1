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

#include "trajmem/eval/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "trajmem/numcore/rng.hpp"

namespace trajmem::eval {

namespace {

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

seqlm::SampleConfig sample_config(const PipelineConfig& config) {
  seqlm::SampleConfig s = config.sample;
  s.seed = config.seed;
  return s;
}

}  // namespace

seqlm::LMConfig lm_config_for(const vqmem::VQConfig& vq,
                              seqlm::LMConfig base) {
  base.vocab = vq.codebook_size;
  base.observed = vq.observed_tokens();
  base.future = vq.future_tokens();
  return base;
}

vqmem::VQParams<float> train_vq_stage(const data::Dataset& train,
                                      const PipelineConfig& config) {
  nc::Rng init = nc::Rng(config.seed).fork(1);
  auto vq = vqmem::VQParams<float>::init(config.vq, init);
  vqmem::VQTrainConfig tc = config.vq_train;
  tc.seed = config.seed;
  vqmem::train_vq(vq, train, tc);
  return vq;
}

seqlm::LMTrainRecord train_lm_stage(const vqmem::VQParams<float>& vq,
                                    const data::SplitDatasets& splits,
                                    const PipelineConfig& config,
                                    seqlm::LMParams<float>& lm) {
  nc::Rng init = nc::Rng(config.seed).fork(2);
  lm = seqlm::LMParams<float>::init(lm_config_for(vq.config, config.lm), init);
  seqlm::LMTrainConfig tc = config.lm_train;
  tc.seed = config.seed;
  return seqlm::train_lm(lm, vqmem::tokenize_dataset(vq, splits.train),
                         vqmem::tokenize_dataset(vq, splits.val), tc);
}

std::vector<ThetaRow> sweep_theta(const data::SplitDatasets& splits,
                                  const std::vector<std::size_t>& thetas,
                                  const PipelineConfig& config) {
  if (thetas.empty()) throw std::invalid_argument("sweep_theta: no sizes");
  std::vector<ThetaRow> rows;
  for (std::size_t theta : thetas) {
    PipelineConfig c = config;
    c.vq.codebook_size = theta;
    const auto vq = train_vq_stage(splits.train, c);
    seqlm::LMParams<float> lm;
    train_lm_stage(vq, splits, c, lm);
    const auto metrics =
        evaluate(vq, lm, splits.test, sample_config(c), c.threads);
    const auto usage = vqmem::codebook_report(vq, splits.test);
    ThetaRow row;
    row.theta = theta;
    row.storage_bytes = vq.memory.storage_bytes();
    row.reconstruction_ade = vqmem::reconstruction_ade(vq, splits.test);
    row.prediction_ade = metrics.mean_ade;
    row.prediction_fde = metrics.mean_fde;
    row.utilization = usage.utilization;
    row.perplexity = usage.perplexity;
    rows.push_back(row);
  }
  return rows;
}

std::vector<MaskRow> compare_masks(const vqmem::VQParams<float>& vq,
                                   const data::SplitDatasets& splits,
                                   const PipelineConfig& config) {
  std::vector<MaskRow> rows;
  for (seqlm::MaskKind kind :
       {seqlm::MaskKind::kSemiCausal, seqlm::MaskKind::kCausal}) {
    PipelineConfig c = config;
    c.lm.mask = kind;
    seqlm::LMParams<float> lm;
    const auto record = train_lm_stage(vq, splits, c, lm);
    const auto metrics =
        evaluate(vq, lm, splits.test, sample_config(c), c.threads);
    MaskRow row;
    row.mask = kind;
    row.converged_at = record.converged_at;
    row.iterations = record.iterations;
    row.best_val_loss = std::numeric_limits<double>::infinity();
    for (const auto& e : record.evals) {
      row.best_val_loss = std::min(row.best_val_loss, e.val_loss);
    }
    row.prediction_ade = metrics.mean_ade;
    row.prediction_fde = metrics.mean_fde;
    rows.push_back(row);
  }
  return rows;
}

void write_theta_csv(std::ostream& out, const std::vector<ThetaRow>& rows) {
  out << "theta,storage_bytes,reconstruction_ade,prediction_ade,"
         "prediction_fde,utilization,perplexity\n";
  for (const auto& r : rows) {
    out << r.theta << ',' << r.storage_bytes << ','
        << fixed9(r.reconstruction_ade) << ',' << fixed9(r.prediction_ade)
        << ',' << fixed9(r.prediction_fde) << ',' << fixed9(r.utilization)
        << ',' << fixed9(r.perplexity) << '\n';
  }
}

void write_mask_csv(std::ostream& out, const std::vector<MaskRow>& rows) {
  out << "mask,converged,iterations_to_convergence,iterations,best_val_loss,"
         "prediction_ade,prediction_fde\n";
  for (const auto& r : rows) {
    out << seqlm::mask_name(r.mask) << ','
        << (r.converged_at ? "yes" : "no") << ','
        << (r.converged_at ? std::to_string(*r.converged_at) : "") << ','
        << r.iterations << ','
        << (std::isfinite(r.best_val_loss) ? fixed9(r.best_val_loss) : "")
        << ','
        << fixed9(r.prediction_ade) << ',' << fixed9(r.prediction_fde)
        << '\n';
  }
}

}  // namespace trajmem::eval
