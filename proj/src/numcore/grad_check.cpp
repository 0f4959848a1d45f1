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

#include "trajmem/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trajmem/numcore/tape.hpp"

namespace trajmem::nc {

template <typename T>
GradCheckReport grad_check(const std::function<Tensor<T>()>& loss_fn,
                           TensorList<T> params,
                           const GradCheckOptions& options) {
  for (Tensor<T>& p : params) {
    if (!p.requires_grad()) p.set_requires_grad(true);
    p.zero_grad();
  }
  Tape<T>::current().clear();
  {
    Tensor<T> loss = loss_fn();
    backward(loss);
  }

  GradCheckReport report;
  const T h = static_cast<T>(options.step);
  NoGradGuard no_grad;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor<T>& p = params[pi];
    auto values = p.data();
    auto tape_grad = p.grad();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const T original = values[j];
      values[j] = original + h;
      const double up = static_cast<double>(loss_fn().item());
      values[j] = original - h;
      const double down = static_cast<double>(loss_fn().item());
      values[j] = original;

      const double numeric = (up - down) / (2.0 * static_cast<double>(h));
      const double analytic = static_cast<double>(tape_grad[j]);
      const double abs_err = std::abs(analytic - numeric);
      const double denom = std::max(
          {std::abs(analytic), std::abs(numeric), options.floor});
      const double rel_err = abs_err / denom;
      ++report.checked;
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel_err > report.max_rel_error || report.worst.empty()) {
        report.max_rel_error = std::max(report.max_rel_error, rel_err);
        std::ostringstream out;
        out << "param#" << pi << '[' << j << "]: tape=" << analytic
            << " numeric=" << numeric;
        report.worst = out.str();
      }
    }
    p.zero_grad();
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

template GradCheckReport grad_check<float>(
    const std::function<Tensor<float>()>&, TensorList<float>,
    const GradCheckOptions&);
template GradCheckReport grad_check<double>(
    const std::function<Tensor<double>()>&, TensorList<double>,
    const GradCheckOptions&);

}  // namespace trajmem::nc
