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

#include "trajmem/vqmem/checkpoint.hpp"

#include <fstream>

#include "trajmem/numcore/binary_io.hpp"

namespace trajmem::vqmem {

namespace {
constexpr char kMagic[5] = "TMCK";
constexpr std::uint8_t kVersion = 1;
}  // namespace

double Checkpoint::config_value(const std::string& key) const {
  for (const auto& [k, v] : config) {
    if (k == key) return v;
  }
  throw nc::FormatError("checkpoint '" + kind + "' lacks config key " + key);
}

const nc::Tensor<float>& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [k, t] : tensors) {
    if (k == name) return t;
  }
  throw nc::FormatError("checkpoint '" + kind + "' lacks tensor " + name);
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  nc::BinaryWriter w(out);
  w.put_bytes(kMagic, 4);
  w.put(kVersion);
  w.put_string(ckpt.kind);
  w.put(static_cast<std::uint32_t>(ckpt.config.size()));
  for (const auto& [key, value] : ckpt.config) {
    w.put_string(key);
    w.put_f64(value);
  }
  w.put(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    w.put_string(name);
    w.put(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t extent : t.shape()) {
      w.put(static_cast<std::uint32_t>(extent));
    }
    for (float v : t.data()) w.put_f32(v);
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  nc::BinaryReader r(in);
  r.expect_magic(kMagic, "checkpoint");
  const auto version = r.get<std::uint8_t>();
  if (version != kVersion) {
    throw nc::FormatError("checkpoint: unsupported version " +
                          std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.kind = r.get_string();
  const auto n_config = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_config; ++i) {
    std::string key = r.get_string();
    const double value = r.get_f64();
    ckpt.config.emplace_back(std::move(key), value);
  }
  const auto n_tensors = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.get_string();
    const auto rank = r.get<std::uint8_t>();
    nc::Shape shape(rank);
    for (auto& extent : shape) extent = r.get<std::uint32_t>();
    std::vector<float> values(nc::shape_numel(shape));
    for (float& v : values) v = r.get_f32();
    ckpt.tensors.emplace_back(std::move(name),
                              nc::Tensor<float>::from(shape, std::move(values)));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace trajmem::vqmem
