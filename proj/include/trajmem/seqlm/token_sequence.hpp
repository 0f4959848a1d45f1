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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajmem::seqlm {

// Memory-array indices for one trajectory: `observed` prefix tokens from the
// past encoder followed by `future` tokens from the future encoder.
struct TokenSequence {
  std::vector<std::int32_t> tokens;
  std::size_t observed = 0;
  std::size_t future = 0;

  std::size_t size() const { return tokens.size(); }
  std::span<const std::int32_t> prefix() const {
    return std::span<const std::int32_t>(tokens).first(observed);
  }
  std::span<const std::int32_t> suffix() const {
    return std::span<const std::int32_t>(tokens).subspan(observed, future);
  }

  void validate(std::size_t vocab) const {
    if (tokens.size() != observed + future) {
      throw std::invalid_argument("token sequence length " +
                                  std::to_string(tokens.size()) +
                                  " != observed + future");
    }
    for (std::int32_t t : tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
        throw std::invalid_argument("token " + std::to_string(t) +
                                    " outside vocabulary of " +
                                    std::to_string(vocab));
      }
    }
  }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

}  // namespace trajmem::seqlm
