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
#include <functional>
#include <vector>

#include "trajmem/numcore/tensor.hpp"

namespace trajmem::nc {

// Ordered log of differentiable operations recorded on the current thread.
// Each entry owns the handles it needs and a closure that pushes the
// output gradient into its inputs. One tape per thread and precision.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  static Tape& current();

  void record(BackwardFn fn) { entries_.push_back(std::move(fn)); }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

  // Seeds d(loss)/d(loss) = 1, replays the tape newest-first and clears it.
  // Returns the number of entries replayed.
  std::size_t backward(Tensor<T>& loss);

 private:
  std::vector<BackwardFn> entries_;
};

// Thread-local switch consulted by every op before recording.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename T>
std::size_t backward(Tensor<T>& loss) {
  return Tape<T>::current().backward(loss);
}

}  // namespace trajmem::nc
