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

#include "trajmem/data/dataset_io.hpp"

#include <fstream>

#include "trajmem/numcore/binary_io.hpp"

namespace trajmem::data {

namespace {
constexpr char kMagic[5] = "TMDS";
constexpr std::uint8_t kVersion = 1;
}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
  dataset.validate();
  nc::BinaryWriter w(out);
  w.put_bytes(kMagic, 4);
  w.put(kVersion);
  w.put(static_cast<std::uint8_t>(dataset.split));
  w.put(static_cast<std::uint32_t>(dataset.size()));
  w.put(static_cast<std::uint32_t>(dataset.observed));
  w.put(static_cast<std::uint32_t>(dataset.predicted));
  for (const Trajectory& t : dataset.trajectories) {
    w.put(t.agent_id);
    w.put(t.label);
    for (const Point& p : t.points) {
      w.put_f32(static_cast<float>(p.x));
      w.put_f32(static_cast<float>(p.y));
    }
  }
}

Dataset read_dataset(std::istream& in) {
  nc::BinaryReader r(in);
  r.expect_magic(kMagic, "dataset cache");
  const auto version = r.get<std::uint8_t>();
  if (version != kVersion) {
    throw nc::FormatError("dataset cache: unsupported version " +
                          std::to_string(version));
  }
  const auto split = r.get<std::uint8_t>();
  if (split > 2) throw nc::FormatError("dataset cache: bad split tag");
  Dataset d;
  d.split = static_cast<Split>(split);
  const auto count = r.get<std::uint32_t>();
  d.observed = r.get<std::uint32_t>();
  d.predicted = r.get<std::uint32_t>();
  const std::size_t length = d.observed + d.predicted;
  d.trajectories.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Trajectory t;
    t.agent_id = r.get<std::int32_t>();
    t.label = r.get<std::int32_t>();
    t.observed = d.observed;
    t.predicted = d.predicted;
    t.points.resize(length);
    for (Point& p : t.points) {
      p.x = r.get_f32();
      p.y = r.get_f32();
    }
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, dataset);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace trajmem::data
