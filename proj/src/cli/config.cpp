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

#include "trajmem/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trajmem/cli/manifest.hpp"

namespace trajmem::cli {

const std::vector<KeySpec>& known_keys() {
  using K = ValueKind;
  static const std::vector<KeySpec> keys = {
      {"run.dir", K::kText, "trajmem_run", "artifact directory"},
      {"seed", K::kCount, "2026", "seed for the corpus, training and sampling"},
      {"data.count", K::kCount, "4000", "synthetic trajectories"},
      {"data.train", K::kCount, "3200", "training split size"},
      {"data.val", K::kCount, "400", "validation split size"},
      {"data.test", K::kCount, "400", "test split size"},
      {"data.observed", K::kCount, "8", "observed frames t_obs"},
      {"data.predicted", K::kCount, "12", "predicted frames t_pred"},
      {"data.noise", K::kReal, "0.01", "synthetic position noise sigma"},
      {"data.speed_min", K::kReal, "0.1", "synthetic minimum speed per frame"},
      {"data.speed_max", K::kReal, "0.4", "synthetic maximum speed per frame"},
      {"ingest.frame_stride", K::kCount, "0", "frame id spacing, 0 infers"},
      {"ingest.window_stride", K::kCount, "1", "sliding window step"},
      {"ingest.train_fraction", K::kReal, "0.8", "share of ingested windows"},
      {"ingest.val_fraction", K::kReal, "0.1", "share of ingested windows"},
      {"vq.window", K::kCount, "2", "frames per token w"},
      {"vq.codebook_size", K::kCount, "64", "memory entries K"},
      {"vq.entry_dim", K::kCount, "16", "entry dimension n_k"},
      {"vq.hidden", K::kCount, "64", "encoder/decoder hidden width"},
      {"vq.beta", K::kReal, "0.25", "commitment weight"},
      {"vq.rotate", K::kFlag, "true", "rotate the final heading onto +x"},
      {"vq.epochs", K::kCount, "50", "VQ training epochs"},
      {"vq.batch_size", K::kCount, "8", "VQ batch size"},
      {"vq.learning_rate", K::kReal, "0.01", "VQ Adam learning rate"},
      {"vq.cosine_decay", K::kFlag, "true", "cosine learning-rate decay"},
      {"vq.dead_after", K::kCount, "100", "idle steps before a reseed, 0 off"},
      {"lm.d_model", K::kCount, "64", "transformer width"},
      {"lm.heads", K::kCount, "4", "attention heads"},
      {"lm.layers", K::kCount, "3", "transformer blocks"},
      {"lm.ff", K::kCount, "128", "feed-forward width"},
      {"lm.mask", K::kMask, "semi-causal", "semi-causal or causal"},
      {"lm.epochs", K::kCount, "30", "LM training epochs"},
      {"lm.batch_size", K::kCount, "32", "LM batch size"},
      {"lm.learning_rate", K::kReal, "0.001", "LM Adam learning rate"},
      {"lm.eval_every", K::kCount, "25", "iterations between validations"},
      {"lm.min_delta", K::kReal, "0.0001", "plateau improvement threshold"},
      {"lm.patience", K::kCount, "20", "stalled validations for a plateau"},
      {"lm.stop_at_convergence", K::kFlag, "false", "stop at the plateau"},
      {"sample.count", K::kCount, "20", "samples per prediction K_samples"},
      {"sample.temperature", K::kReal, "1", "sampling temperature"},
      {"eval.threads", K::kCount, "1", "evaluation worker threads"},
      {"bench.trials", K::kCount, "200", "timed predictions"},
      {"bench.warmup", K::kCount, "20", "untimed predictions first"},
      {"bench.samples", K::kCount, "1", "samples per timed prediction"},
      {"sweep.thetas", K::kCountList, "16,32,64,128,256", "memory sizes"},
      {"plot.count", K::kCount, "8", "trajectories in export-plot"},
  };
  return keys;
}

namespace {

const KeySpec* find_key(std::string_view key) {
  for (const auto& spec : known_keys()) {
    if (key == spec.key) return &spec;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_count(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::string canonical(const KeySpec& spec, std::string_view value) {
  const std::string v(trim(value));
  auto fail = [&](const char* what) -> std::string {
    throw ConfigError(std::string("config key ") + spec.key + ": '" + v +
                      "' is not " + what);
  };
  switch (spec.kind) {
    case ValueKind::kCount: {
      std::size_t n = 0;
      if (!parse_count(v, n)) fail("a non-negative integer");
      return std::to_string(n);
    }
    case ValueKind::kReal: {
      char* end = nullptr;
      const double d = std::strtod(v.c_str(), &end);
      if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) {
        fail("a finite number");
      }
      // Shortest text that reads back to the same double.
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
      return std::string(buf, ptr);
    }
    case ValueKind::kFlag:
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      return fail("true or false");
    case ValueKind::kText:
      if (v.empty()) fail("a non-empty string");
      return v;
    case ValueKind::kCountList: {
      std::string out;
      std::string_view rest = v;
      while (true) {
        const auto comma = rest.find(',');
        std::size_t n = 0;
        if (!parse_count(trim(rest.substr(0, comma)), n) || n == 0) {
          fail("a comma-separated list of positive integers");
        }
        if (!out.empty()) out += ',';
        out += std::to_string(n);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return out;
    }
    case ValueKind::kMask:
      if (v == "semi-causal" || v == "causal") return v;
      return fail("semi-causal or causal");
  }
  return v;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& spec : known_keys()) {
    values_[spec.key] = canonical(spec, spec.default_value);
  }
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(trim(key));
  if (spec == nullptr) {
    throw ConfigError("unknown config key '" + std::string(trim(key)) + "'");
  }
  values_[spec->key] = canonical(*spec, value);
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) +
                      "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    try {
      config.apply_override(line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  RunConfig placed = *this;
  placed.values_.erase("run.dir");
  return fnv1a(placed.serialize());
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

std::size_t RunConfig::count(const std::string& key) const {
  std::size_t n = 0;
  if (!parse_count(raw(key), n)) throw ConfigError(key + " is not a count");
  return n;
}

double RunConfig::real(const std::string& key) const {
  return std::strtod(raw(key).c_str(), nullptr);
}

bool RunConfig::flag(const std::string& key) const {
  return raw(key) == "true";
}

const std::string& RunConfig::text(const std::string& key) const {
  return raw(key);
}

std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  std::string_view rest = raw(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::size_t n = 0;
    parse_count(rest.substr(0, comma), n);
    out.push_back(n);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& why) {
    if (!ok) throw ConfigError(why);
  };
  const std::size_t w = count("vq.window");
  require(w > 0, "vq.window must be positive");
  require(count("data.observed") % w == 0 && count("data.predicted") % w == 0,
          "vq.window must divide data.observed and data.predicted");
  require(count("data.observed") >= 2, "data.observed must be >= 2");
  require(count("data.predicted") > 0, "data.predicted must be positive");
  require(count("lm.heads") > 0 && count("lm.d_model") % count("lm.heads") == 0,
          "lm.heads must divide lm.d_model");
  require(count("data.train") + count("data.val") + count("data.test") <=
              count("data.count"),
          "data.train + data.val + data.test exceeds data.count");
  require(count("data.train") > 0 && count("data.val") > 0 &&
              count("data.test") > 0,
          "every split needs at least one trajectory");
  require(real("data.speed_min") <= real("data.speed_max"),
          "data.speed_min exceeds data.speed_max");
  require(real("data.noise") >= 0, "data.noise must be >= 0");
  const double tf = real("ingest.train_fraction");
  const double vf = real("ingest.val_fraction");
  require(tf > 0 && vf >= 0 && tf + vf < 1,
          "ingest fractions must leave room for a test split");
  require(count("sample.count") > 0, "sample.count must be positive");
  require(real("sample.temperature") > 0, "sample.temperature must be > 0");
  require(count("vq.batch_size") > 0 && count("lm.batch_size") > 0,
          "batch sizes must be positive");
  require(count("lm.eval_every") > 0, "lm.eval_every must be positive");
  require(count("vq.codebook_size") > 0 && count("vq.codebook_size") <= 65536,
          "vq.codebook_size must be in [1, 65536]");
  require(count("bench.trials") > 0 && count("bench.samples") > 0,
          "bench.trials and bench.samples must be positive");
}

data::SynthConfig synth_config(const RunConfig& config) {
  data::SynthConfig s;
  s.count = config.count("data.count");
  s.observed = config.count("data.observed");
  s.predicted = config.count("data.predicted");
  s.noise_sigma = config.real("data.noise");
  s.speed_min = config.real("data.speed_min");
  s.speed_max = config.real("data.speed_max");
  return s;
}

data::SplitSizes split_sizes(const RunConfig& config) {
  return {config.count("data.train"), config.count("data.val"),
          config.count("data.test")};
}

eval::PipelineConfig pipeline_config(const RunConfig& config) {
  eval::PipelineConfig p;
  p.seed = config.count("seed");
  p.threads = config.count("eval.threads");

  p.vq.codebook_size = config.count("vq.codebook_size");
  p.vq.entry_dim = config.count("vq.entry_dim");
  p.vq.window = config.count("vq.window");
  p.vq.hidden = config.count("vq.hidden");
  p.vq.observed = config.count("data.observed");
  p.vq.predicted = config.count("data.predicted");
  p.vq.beta = config.real("vq.beta");
  p.vq.rotate = config.flag("vq.rotate");

  p.vq_train.epochs = config.count("vq.epochs");
  p.vq_train.batch_size = config.count("vq.batch_size");
  p.vq_train.learning_rate = config.real("vq.learning_rate");
  p.vq_train.cosine_decay = config.flag("vq.cosine_decay");
  p.vq_train.dead_after = config.count("vq.dead_after");
  p.vq_train.seed = p.seed;

  p.lm.d_model = config.count("lm.d_model");
  p.lm.heads = config.count("lm.heads");
  p.lm.layers = config.count("lm.layers");
  p.lm.ff = config.count("lm.ff");
  p.lm.mask = seqlm::parse_mask_kind(config.text("lm.mask"));
  p.lm = eval::lm_config_for(p.vq, p.lm);

  p.lm_train.epochs = config.count("lm.epochs");
  p.lm_train.batch_size = config.count("lm.batch_size");
  p.lm_train.learning_rate = config.real("lm.learning_rate");
  p.lm_train.eval_every = config.count("lm.eval_every");
  p.lm_train.min_delta = config.real("lm.min_delta");
  p.lm_train.patience = config.count("lm.patience");
  p.lm_train.stop_at_convergence = config.flag("lm.stop_at_convergence");
  p.lm_train.seed = p.seed;

  p.sample.samples = config.count("sample.count");
  p.sample.temperature = config.real("sample.temperature");
  p.sample.seed = p.seed;
  return p;
}

}  // namespace trajmem::cli
