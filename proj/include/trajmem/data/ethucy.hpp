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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajmem/data/trajectory.hpp"

namespace trajmem::data {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& why);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct AgentTrack {
  std::int32_t agent_id = 0;
  std::vector<std::int64_t> frames;  // strictly increasing
  std::vector<Point> points;
};

struct Observations {
  // Frame spacing that counts as contiguous.
  std::int64_t frame_stride = 0;
  std::vector<AgentTrack> agents;  // sorted by agent id

  bool empty() const { return agents.empty(); }
};

// Reads whitespace-separated `frame_id agent_id x y` rows. Blank lines and
// lines starting with '#' are skipped. A `frame_stride` of 0 infers the
// file's native spacing as the smallest positive gap between distinct
// frame ids.
Observations load_ethucy_text(const std::filesystem::path& path,
                              std::int64_t frame_stride = 0);

// Sliding windows of observed + predicted frames over every maximal run of
// contiguous frames per agent, advancing `window_stride` samples at a time.
std::vector<Trajectory> extract_tracks(const Observations& observations,
                                       std::size_t observed = kDefaultObserved,
                                       std::size_t predicted = kDefaultPredicted,
                                       std::size_t window_stride = 1);

}  // namespace trajmem::data
