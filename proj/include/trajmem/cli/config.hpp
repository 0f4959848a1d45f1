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
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trajmem/data/synth.hpp"
#include "trajmem/eval/ablation.hpp"

namespace trajmem::cli {

// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "TRAJMEM_CONFIG";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueKind { kCount, kReal, kFlag, kText, kCountList, kMask };

struct KeySpec {
  const char* key;
  ValueKind kind;
  const char* default_value;
  const char* help;
};

// Every accepted key with its default, in documentation order.
const std::vector<KeySpec>& known_keys();

// Flat key=value settings. Values are stored in canonical text form, so
// serialize() followed by parse() reproduces the same config.
class RunConfig {
 public:
  RunConfig();  // all defaults

  // Applies `key = value` lines over the defaults. '#' starts a comment.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);

  // Throws ConfigError on an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  // "key=value" form used by --set.
  void apply_override(std::string_view assignment);

  std::string serialize() const;
  // FNV-1a of serialize() without run.dir, which only places artifacts.
  std::uint64_t hash() const;

  std::size_t count(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  // Cross-key constraints (window divides both horizons, heads divide
  // d_model, split sizes fit the corpus, ...).
  void validate() const;

  bool operator==(const RunConfig& other) const {
    return values_ == other.values_;
  }

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

data::SynthConfig synth_config(const RunConfig& config);
data::SplitSizes split_sizes(const RunConfig& config);
eval::PipelineConfig pipeline_config(const RunConfig& config);

}  // namespace trajmem::cli
