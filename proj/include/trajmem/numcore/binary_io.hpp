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

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace trajmem::nc {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Little-endian primitive writer, independent of host byte order.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename U>
    requires std::is_integral_v<U>
  void put(U value) {
    using Unsigned = std::make_unsigned_t<U>;
    auto bits = static_cast<Unsigned>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
  }
  void put_f32(float value) { put(std::bit_cast<std::uint32_t>(value)); }
  void put_f64(double value) { put(std::bit_cast<std::uint64_t>(value)); }
  void put_bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint16_t>(s.size()));
    put_bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename U>
    requires std::is_integral_v<U>
  U get() {
    using Unsigned = std::make_unsigned_t<U>;
    Unsigned bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        throw FormatError("unexpected end of file");
      }
      bits |= static_cast<Unsigned>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return static_cast<U>(bits);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  void get_bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("unexpected end of file");
    }
  }
  std::string get_string() {
    const auto n = get<std::uint16_t>();
    std::string s(n, '\0');
    get_bytes(s.data(), n);
    return s;
  }
  void expect_magic(const char (&magic)[5], const std::string& what) {
    char buf[4];
    get_bytes(buf, 4);
    if (std::memcmp(buf, magic, 4) != 0) {
      throw FormatError(what + ": bad magic");
    }
  }

 private:
  std::istream& in_;
};

}  // namespace trajmem::nc
