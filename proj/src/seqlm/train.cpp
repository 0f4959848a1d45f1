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

#include "trajmem/seqlm/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "trajmem/numcore/adam.hpp"
#include "trajmem/numcore/binary_io.hpp"
#include "trajmem/numcore/tape.hpp"

namespace trajmem::seqlm {

bool PlateauTracker::observe(std::int64_t iteration, double loss) {
  if (converged_) return true;
  if (best_ - loss >= min_delta_) {
    best_ = loss;
    stalled_ = 0;
    candidate_ = iteration;
    return false;
  }
  best_ = std::min(best_, loss);
  if (++stalled_ >= patience_) {
    converged_ = true;
    start_ = candidate_;
  }
  return converged_;
}

double mean_lm_loss(const LMParams<float>& params,
                    const std::vector<TokenSequence>& sequences,
                    std::size_t batch_size) {
  if (sequences.empty()) return 0.0;
  nc::NoGradGuard no_grad;
  double total = 0;
  for (std::size_t start = 0; start < sequences.size(); start += batch_size) {
    const std::size_t end = std::min(sequences.size(), start + batch_size);
    std::vector<const TokenSequence*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&sequences[i]);
    total += static_cast<double>(lm_loss(params, batch).item()) *
             static_cast<double>(batch.size());
  }
  return total / static_cast<double>(sequences.size());
}

LMTrainRecord train_lm(LMParams<float>& params,
                       const std::vector<TokenSequence>& train,
                       const std::vector<TokenSequence>& val,
                       const LMTrainConfig& config,
                       const std::function<void(const LMEpochStats&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("train_lm: empty token set");
  if (config.batch_size == 0 || config.eval_every == 0) {
    throw std::invalid_argument("train_lm: batch_size and eval_every > 0");
  }
  nc::Adam<float> adam(nc::tensors_of(params.named_parameters()),
                       {.learning_rate = config.learning_rate});
  const nc::Rng root(config.seed);
  PlateauTracker plateau(config.min_delta, config.patience);
  LMTrainRecord record;
  std::vector<std::size_t> order(train.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    nc::Rng shuffle = root.fork(epoch + 1);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.below(i)]);
    }
    LMEpochStats stats;
    stats.epoch = epoch;
    std::size_t batches = 0;
    bool stop = false;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const TokenSequence*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);

      nc::Tape<float>::current().clear();
      nc::Tensor<float> loss = lm_loss(params, batch);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        nc::Tape<float>::current().clear();
        throw LMTrainingDiverged("lm training diverged at epoch " +
                                 std::to_string(epoch) + ", iteration " +
                                 std::to_string(record.iterations) +
                                 ": loss " + std::to_string(value));
      }
      nc::backward(loss);
      adam.step();
      ++record.iterations;
      stats.train_loss += value;
      ++batches;

      if (record.iterations % static_cast<std::int64_t>(config.eval_every) ==
          0) {
        const double v = val.empty() ? value : mean_lm_loss(params, val);
        record.evals.push_back({record.iterations, v});
        if (plateau.observe(record.iterations, v) &&
            config.stop_at_convergence) {
          stop = true;
          break;
        }
      }
    }
    stats.train_loss /= static_cast<double>(batches);
    stats.val_loss = val.empty() ? stats.train_loss : mean_lm_loss(params, val);
    record.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stop) break;
  }
  record.converged_at = plateau.plateau_start();
  return record;
}

namespace {
constexpr char kTokenMagic[5] = "TMTK";
constexpr std::uint8_t kTokenVersion = 1;
}  // namespace

void write_tokens(std::ostream& out, const TokenFile& file) {
  if (file.vocab == 0 || file.vocab > 65536) {
    throw std::invalid_argument("token file vocabulary must be in [1, 65536]");
  }
  nc::BinaryWriter w(out);
  w.put_bytes(kTokenMagic, 4);
  w.put(kTokenVersion);
  w.put(static_cast<std::uint32_t>(file.vocab));
  w.put(static_cast<std::uint32_t>(file.observed));
  w.put(static_cast<std::uint32_t>(file.future));
  w.put(static_cast<std::uint32_t>(file.sequences.size()));
  for (const TokenSequence& s : file.sequences) {
    if (s.observed != file.observed || s.future != file.future) {
      throw std::invalid_argument("token sequence shape differs from header");
    }
    s.validate(file.vocab);
    for (std::int32_t t : s.tokens) w.put(static_cast<std::uint16_t>(t));
  }
}

TokenFile read_tokens(std::istream& in) {
  nc::BinaryReader r(in);
  r.expect_magic(kTokenMagic, "token file");
  const auto version = r.get<std::uint8_t>();
  if (version != kTokenVersion) {
    throw nc::FormatError("token file: unsupported version " +
                          std::to_string(version));
  }
  TokenFile file;
  file.vocab = r.get<std::uint32_t>();
  file.observed = r.get<std::uint32_t>();
  file.future = r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();
  file.sequences.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    TokenSequence s;
    s.observed = file.observed;
    s.future = file.future;
    s.tokens.resize(file.observed + file.future);
    for (auto& t : s.tokens) {
      t = r.get<std::uint16_t>();
      if (static_cast<std::size_t>(t) >= file.vocab) {
        throw nc::FormatError("token file: id " + std::to_string(t) +
                              " outside vocabulary " +
                              std::to_string(file.vocab));
      }
    }
    file.sequences.push_back(std::move(s));
  }
  return file;
}

void save_tokens(const std::filesystem::path& path, const TokenFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_tokens(out, file);
}

TokenFile load_tokens(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_tokens(in);
}

vqmem::Checkpoint lm_checkpoint(const LMParams<float>& params) {
  const LMConfig& c = params.config;
  return {"lm",
          {{"vocab", static_cast<double>(c.vocab)},
           {"d_model", static_cast<double>(c.d_model)},
           {"heads", static_cast<double>(c.heads)},
           {"layers", static_cast<double>(c.layers)},
           {"ff", static_cast<double>(c.ff)},
           {"observed", static_cast<double>(c.observed)},
           {"future", static_cast<double>(c.future)},
           {"mask", c.mask == MaskKind::kCausal ? 1.0 : 0.0}},
          params.named_parameters()};
}

LMParams<float> lm_from_checkpoint(const vqmem::Checkpoint& ckpt) {
  if (ckpt.kind != "lm") {
    throw nc::FormatError("expected an lm checkpoint, got '" + ckpt.kind + "'");
  }
  auto count = [&](const char* key) {
    const double v = ckpt.config_value(key);
    if (!(v >= 0) || v != std::floor(v)) {
      throw nc::FormatError(std::string("checkpoint key ") + key +
                            " is not a count");
    }
    return static_cast<std::size_t>(v);
  };
  LMConfig c;
  c.vocab = count("vocab");
  c.d_model = count("d_model");
  c.heads = count("heads");
  c.layers = count("layers");
  c.ff = count("ff");
  c.observed = count("observed");
  c.future = count("future");
  c.mask = ckpt.config_value("mask") != 0.0 ? MaskKind::kCausal
                                            : MaskKind::kSemiCausal;
  nc::Rng scratch(0);
  LMParams<float> params = LMParams<float>::init(c, scratch);
  auto dst = params.named_parameters();
  try {
    nc::copy_parameters(ckpt.tensors, dst);
  } catch (const nc::ContractError& e) {
    throw nc::FormatError(std::string("lm checkpoint: ") + e.what());
  }
  return params;
}

}  // namespace trajmem::seqlm
