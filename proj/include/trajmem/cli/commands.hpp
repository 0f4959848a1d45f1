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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajmem/cli/config.hpp"

namespace trajmem::cli {

// An upstream artifact is missing; names the command that produces it.
class DependencyError : public std::runtime_error {
 public:
  DependencyError(const std::filesystem::path& missing,
                  const std::string& command);
  const std::string& command() const { return command_; }

 private:
  std::string command_;
};

struct CommandOptions {
  // Source file for `ingest`.
  std::filesystem::path input;
};

// Subcommand names in pipeline order.
const std::vector<std::string>& command_names();

// Runs one subcommand against the artifacts under config.text("run.dir").
// Progress goes to `log`. Throws ConfigError, DependencyError or the
// module errors.
void run_command(const std::string& name, const RunConfig& config,
                 const CommandOptions& options, std::ostream& log);

}  // namespace trajmem::cli
