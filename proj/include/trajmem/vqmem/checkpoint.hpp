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
#include <string>
#include <utility>
#include <vector>

#include "trajmem/numcore/layers.hpp"

namespace trajmem::vqmem {

// Shared binary container for model checkpoints:
//   "TMCK" | u8 version=1 | str kind | u32 n_config | n_config x (str key,
//   f64 value) | u32 n_tensors | n_tensors x (str name, u8 rank,
//   rank x u32 extent, f32 values...)
// where str = u16 length + bytes. All fields little-endian.
struct Checkpoint {
  std::string kind;
  std::vector<std::pair<std::string, double>> config;
  nc::NamedTensors<float> tensors;

  // Throws nc::FormatError when `key` is absent.
  double config_value(const std::string& key) const;
  const nc::Tensor<float>& tensor(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace trajmem::vqmem
