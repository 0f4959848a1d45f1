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
#include <string>

#include "trajmem/numcore/tensor.hpp"

namespace trajmem::nc {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "param#i[j]: tape=... numeric=..."
  bool passed = false;
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Relative error is |tape - numeric| / max(|tape|, |numeric|, floor), so
  // components whose true gradient is far below `floor` are compared on an
  // absolute scale instead of amplifying rounding noise.
  double floor = 1e-3;
};

// Compares tape gradients of the scalar `loss_fn` with respect to `params`
// against central differences. `loss_fn` must be deterministic; any
// discrete choices inside it (quantizer assignments) have to be frozen by
// the caller so the probed function is smooth.
template <typename T>
GradCheckReport grad_check(const std::function<Tensor<T>()>& loss_fn,
                           TensorList<T> params,
                           const GradCheckOptions& options = {});

}  // namespace trajmem::nc
