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

#include "trajmem/vqmem/train.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "trajmem/data/normalize.hpp"
#include "trajmem/numcore/adam.hpp"
#include "trajmem/numcore/binary_io.hpp"
#include "trajmem/numcore/tape.hpp"

namespace trajmem::vqmem {

std::vector<data::Trajectory> normalize_all(const data::Dataset& dataset,
                                            bool rotate) {
  std::vector<data::Trajectory> out;
  out.reserve(dataset.size());
  for (const auto& t : dataset.trajectories) {
    out.push_back(data::normalize(t, rotate).first);
  }
  return out;
}

namespace {

void check_dataset(const VQConfig& c, const data::Dataset& d) {
  if (d.observed != c.observed || d.predicted != c.predicted) {
    throw std::invalid_argument(
        "dataset protocol " + std::to_string(d.observed) + "/" +
        std::to_string(d.predicted) + " does not match model " +
        std::to_string(c.observed) + "/" + std::to_string(c.predicted));
  }
  d.validate(c.window);
}

}  // namespace

double cosine_rate(double base, std::int64_t step, std::int64_t total) {
  if (total <= 0) return base;
  const double t = static_cast<double>(step) / static_cast<double>(total);
  return base * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

VQTrainResult train_vq(VQParams<float>& params, const data::Dataset& train,
                       const VQTrainConfig& config,
                       const std::function<void(const VQEpochStats&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("train_vq: empty dataset");
  if (config.batch_size == 0) {
    throw std::invalid_argument("train_vq: batch_size must be > 0");
  }
  check_dataset(params.config, train);
  const std::vector<data::Trajectory> items =
      normalize_all(train, params.config.rotate);

  auto named = params.named_parameters();
  const std::size_t memory_slot = named.size() - 1;  // entries come last
  nc::Adam<float> adam(nc::tensors_of(named),
                       {.learning_rate = config.learning_rate});
  const nc::Rng root(config.seed);
  nc::Rng reseed_rng = root.fork(0xC0DEB00C);

  const std::size_t k_count = params.memory.size();
  const std::size_t dim = params.memory.dim();
  std::vector<std::size_t> idle(k_count, 0);
  std::vector<std::size_t> order(items.size());
  const std::int64_t total_steps = static_cast<std::int64_t>(
      config.epochs *
      ((items.size() + config.batch_size - 1) / config.batch_size));
  VQTrainResult result;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    nc::Rng shuffle = root.fork(epoch + 1);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    params.memory.reset_usage();
    VQEpochStats stats;
    stats.epoch = epoch;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      Batch batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&items[order[i]]);

      if (config.cosine_decay) {
        adam.set_learning_rate(
            cosine_rate(config.learning_rate, result.steps, total_steps));
      }
      nc::Tape<float>::current().clear();
      VQOutput<float> out = vq_losses(params, batch);
      const double total = out.total.item();
      if (!std::isfinite(total)) {
        nc::Tape<float>::current().clear();
        throw TrainingDiverged(
            "vq training diverged at epoch " + std::to_string(epoch) +
            ", step " + std::to_string(result.steps) + ": loss " +
            std::to_string(total) + " (reconstruction " +
            std::to_string(out.reconstruction.item()) + ")");
      }
      nc::backward(out.total);
      adam.step();
      ++result.steps;

      params.memory.record_usage(out.indices);
      std::vector<bool> hit(k_count, false);
      for (std::int32_t k : out.indices) hit[static_cast<std::size_t>(k)] = true;
      auto entries = params.memory.entries.data();
      const auto v_a = out.v_a.data();
      for (std::size_t k = 0; k < k_count; ++k) {
        idle[k] = hit[k] ? 0 : idle[k] + 1;
        if (idle[k] < config.dead_after) continue;
        const std::size_t row = reseed_rng.below(out.v_a.dim(0));
        std::copy_n(v_a.begin() + row * dim, dim, entries.begin() + k * dim);
        adam.reset_row(memory_slot, k);
        idle[k] = 0;
        ++stats.reseeded;
      }

      stats.reconstruction += out.reconstruction.item();
      stats.codebook += out.codebook.item();
      stats.commitment += out.commitment.item();
      stats.total += total;
      ++batches;
    }
    const double n = static_cast<double>(batches);
    stats.reconstruction /= n;
    stats.codebook /= n;
    stats.commitment /= n;
    stats.total /= n;
    std::size_t used = 0;
    for (std::int64_t c : params.memory.usage_counts) used += c > 0;
    stats.utilization = static_cast<double>(used) / static_cast<double>(k_count);
    result.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

CodebookReport codebook_report(std::size_t entries,
                               std::span<const std::int32_t> indices) {
  CodebookReport r;
  r.entries = entries;
  r.histogram.assign(entries, 0);
  for (std::int32_t k : indices) ++r.histogram.at(static_cast<std::size_t>(k));
  double entropy = 0;
  const double n = static_cast<double>(indices.size());
  for (std::int64_t c : r.histogram) {
    if (c == 0) continue;
    ++r.used;
    const double p = static_cast<double>(c) / n;
    entropy -= p * std::log(p);
  }
  r.utilization = entries == 0 ? 0.0
                               : static_cast<double>(r.used) /
                                     static_cast<double>(entries);
  r.perplexity = std::exp(entropy);
  return r;
}

std::vector<seqlm::TokenSequence> tokenize_dataset(
    const VQParams<float>& params, const data::Dataset& dataset) {
  check_dataset(params.config, dataset);
  std::vector<seqlm::TokenSequence> out;
  out.reserve(dataset.size());
  for (const auto& t : normalize_all(dataset, params.config.rotate)) {
    out.push_back(tokenize(params, t));
  }
  return out;
}

CodebookReport codebook_report(const VQParams<float>& params,
                               const data::Dataset& dataset) {
  std::vector<std::int32_t> all;
  for (const auto& s : tokenize_dataset(params, dataset)) {
    all.insert(all.end(), s.tokens.begin(), s.tokens.end());
  }
  return codebook_report(params.memory.size(), all);
}

double reconstruction_ade(const VQParams<float>& params,
                          const data::Dataset& dataset) {
  check_dataset(params.config, dataset);
  if (dataset.empty()) return 0.0;
  double total = 0;
  for (const auto& t : dataset.trajectories) {
    const auto [normalized, transform] = data::normalize(t, params.config.rotate);
    const auto points = data::denormalize(reconstruct(params, normalized),
                                          transform);
    double sum = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      sum += std::hypot(points[k].x - t.points[k].x,
                        points[k].y - t.points[k].y);
    }
    total += sum / static_cast<double>(points.size());
  }
  return total / static_cast<double>(dataset.size());
}

namespace {

std::vector<std::pair<std::string, double>> config_block(const VQConfig& c) {
  return {{"codebook_size", static_cast<double>(c.codebook_size)},
          {"entry_dim", static_cast<double>(c.entry_dim)},
          {"window", static_cast<double>(c.window)},
          {"hidden", static_cast<double>(c.hidden)},
          {"observed", static_cast<double>(c.observed)},
          {"predicted", static_cast<double>(c.predicted)},
          {"beta", c.beta},
          {"rotate", c.rotate ? 1.0 : 0.0}};
}

std::size_t as_size(const Checkpoint& ckpt, const std::string& key) {
  const double v = ckpt.config_value(key);
  if (!(v >= 0) || v != std::floor(v)) {
    throw nc::FormatError("checkpoint key " + key + " is not a count");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

Checkpoint vq_checkpoint(const VQParams<float>& params) {
  return {"vq", config_block(params.config), params.named_parameters()};
}

VQParams<float> vq_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "vq") {
    throw nc::FormatError("expected a vq checkpoint, got '" + ckpt.kind + "'");
  }
  VQConfig c;
  c.codebook_size = as_size(ckpt, "codebook_size");
  c.entry_dim = as_size(ckpt, "entry_dim");
  c.window = as_size(ckpt, "window");
  c.hidden = as_size(ckpt, "hidden");
  c.observed = as_size(ckpt, "observed");
  c.predicted = as_size(ckpt, "predicted");
  c.beta = ckpt.config_value("beta");
  c.rotate = ckpt.config_value("rotate") != 0.0;
  nc::Rng scratch(0);
  VQParams<float> params = VQParams<float>::init(c, scratch);
  auto dst = params.named_parameters();
  try {
    nc::copy_parameters(ckpt.tensors, dst);
  } catch (const nc::ContractError& e) {
    throw nc::FormatError(std::string("vq checkpoint: ") + e.what());
  }
  params.memory.validate();
  return params;
}

Checkpoint codebook_checkpoint(const MemoryArray<float>& memory) {
  return {"codebook",
          {{"codebook_size", static_cast<double>(memory.size())},
           {"entry_dim", static_cast<double>(memory.dim())}},
          {{"memory.entries", memory.entries.clone()}}};
}

}  // namespace trajmem::vqmem
