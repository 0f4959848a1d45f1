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

// trajmem: command-line entry point for the memory-array trajectory
// predictor pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "trajmem/cli/commands.hpp"
#include "trajmem/cli/config.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kDependencyError = 3;

std::string key_help() {
  std::string out = "Config keys (key = default):\n";
  for (const auto& spec : trajmem::cli::known_keys()) {
    out += "  " + std::string(spec.key) + " = " + spec.default_value + "  (" +
           spec.help + ")\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = trajmem::cli;
  CLI::App app{"Trajectory prediction with a discrete memory array and a "
               "semi-causal transformer"};
  app.footer(key_help());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path,
                 std::string("key=value config file (default: $") +
                     cli::kConfigEnv + ")");
  app.add_option("-s,--set", overrides, "override a config key, key=value")
      ->take_all()
      ->allow_extra_args();

  cli::CommandOptions options;
  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"synth", "generate the synthetic corpus and its splits"},
      {"ingest", "import an ETH/UCY text file as the corpus"},
      {"train-vq", "train the encoder, memory array and decoder"},
      {"encode", "tokenize every split with the trained memory array"},
      {"train-lm", "train the sequence model on the token files"},
      {"predict", "write sampled futures for the test split"},
      {"eval", "best-of-K ADE/FDE on the test split"},
      {"bench", "single-prediction latency"},
      {"sweep-theta", "memory-size ablation table"},
      {"compare-masks", "semi-causal vs causal convergence table"},
      {"export-plot", "CSV and SVG of a few predictions"},
  };
  for (const auto& [name, text] : descriptions) {
    auto* sub = app.add_subcommand(name, text);
    if (name == "ingest") {
      sub->add_option("-i,--input", options.input, "frame agent x y text file")
          ->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(cli::kConfigEnv)) config_path = env;
    }
    cli::RunConfig config =
        config_path.empty() ? cli::RunConfig() : cli::RunConfig::load(config_path);
    for (const auto& o : overrides) config.apply_override(o);
    cli::run_command(app.get_subcommands().front()->get_name(), config, options,
                     std::cerr);
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const cli::DependencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDependencyError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
