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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajmem/cli/config.hpp"

namespace trajmem::cli {

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t file_hash(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

// Everything needed to rerun a command exactly: the full resolved config,
// its hash, the seed and the hashes of every file read and written. No
// timestamps, so identical runs produce identical manifests.
struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;
  std::vector<std::pair<std::string, std::uint64_t>> outputs;
};

std::string render_manifest(const Manifest& manifest, const RunConfig& config);

}  // namespace trajmem::cli
