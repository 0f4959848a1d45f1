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

#include "trajmem/cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace trajmem::cli {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string render_manifest(const Manifest& manifest, const RunConfig& config) {
  std::string out = "command=" + manifest.command + "\n";
  out += "config_hash=" + hex64(config.hash()) + "\n";
  out += "seed=" + config.text("seed") + "\n";
  for (const auto& [name, h] : manifest.inputs) {
    out += "input." + name + "=" + hex64(h) + "\n";
  }
  for (const auto& [name, h] : manifest.outputs) {
    out += "output." + name + "=" + hex64(h) + "\n";
  }
  out += "[config]\n" + config.serialize();
  return out;
}

}  // namespace trajmem::cli
