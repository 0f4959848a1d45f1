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

#include "trajmem/data/ethucy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace trajmem::data {

ParseError::ParseError(const std::string& path, std::size_t line,
                       const std::string& why)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + why),
      line_(line) {}

namespace {

// ETH-UCY exports write integer ids as "780.0"; accept any number that is
// integral.
bool parse_integral(const std::string& token, std::int64_t& out) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return false;
  if (!std::isfinite(value) || std::floor(value) != value) return false;
  out = static_cast<std::int64_t>(value);
  return true;
}

bool parse_real(const std::string& token, double& out) {
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() &&
         std::isfinite(out);
}

}  // namespace

Observations load_ethucy_text(const std::filesystem::path& path,
                              std::int64_t frame_stride) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::map<std::int32_t, std::map<std::int64_t, Point>> by_agent;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 4) {
      throw ParseError(path.string(), line_no,
                       "expected 4 fields, found " +
                           std::to_string(tokens.size()));
    }
    std::int64_t frame = 0, agent = 0;
    Point p;
    if (!parse_integral(tokens[0], frame)) {
      throw ParseError(path.string(), line_no, "bad frame id '" + tokens[0] + "'");
    }
    if (!parse_integral(tokens[1], agent)) {
      throw ParseError(path.string(), line_no, "bad agent id '" + tokens[1] + "'");
    }
    if (!parse_real(tokens[2], p.x) || !parse_real(tokens[3], p.y)) {
      throw ParseError(path.string(), line_no, "bad coordinate");
    }
    auto [it, inserted] =
        by_agent[static_cast<std::int32_t>(agent)].emplace(frame, p);
    if (!inserted) {
      throw ParseError(path.string(), line_no,
                       "duplicate frame for agent " + std::to_string(agent));
    }
  }

  Observations result;
  if (frame_stride <= 0) {
    std::vector<std::int64_t> frames;
    for (const auto& [agent, rows] : by_agent) {
      for (const auto& [frame, p] : rows) frames.push_back(frame);
    }
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    std::int64_t gap = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < frames.size(); ++i) {
      gap = std::min(gap, frames[i] - frames[i - 1]);
    }
    frame_stride = frames.size() > 1 ? gap : 1;
  }
  result.frame_stride = frame_stride;
  for (const auto& [agent, rows] : by_agent) {
    AgentTrack track;
    track.agent_id = agent;
    for (const auto& [frame, p] : rows) {
      track.frames.push_back(frame);
      track.points.push_back(p);
    }
    result.agents.push_back(std::move(track));
  }
  return result;
}

std::vector<Trajectory> extract_tracks(const Observations& observations,
                                       std::size_t observed,
                                       std::size_t predicted,
                                       std::size_t window_stride) {
  const std::size_t length = observed + predicted;
  const std::size_t step = std::max<std::size_t>(window_stride, 1);
  std::vector<Trajectory> out;
  for (const AgentTrack& agent : observations.agents) {
    const std::size_t n = agent.frames.size();
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      const bool breaks =
          i == n || agent.frames[i] - agent.frames[i - 1] !=
                        observations.frame_stride;
      if (!breaks) continue;
      for (std::size_t s = run_start; s + length <= i; s += step) {
        Trajectory t;
        t.agent_id = agent.agent_id;
        t.observed = observed;
        t.predicted = predicted;
        t.points.assign(agent.points.begin() + static_cast<std::ptrdiff_t>(s),
                        agent.points.begin() +
                            static_cast<std::ptrdiff_t>(s + length));
        out.push_back(std::move(t));
      }
      run_start = i;
    }
  }
  return out;
}

}  // namespace trajmem::data
