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

#include "trajmem/data/trajectory.hpp"

namespace trajmem::data {

// Binary dataset cache:
//   "TMDS" | u8 version=1 | u8 split | u32 count | u32 observed |
//   u32 predicted | count x (i32 agent_id, i32 label,
//   (observed+predicted) x (f32 x, f32 y))
// All multi-byte fields little-endian. Coordinates are rounded to float32.
void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace trajmem::data
