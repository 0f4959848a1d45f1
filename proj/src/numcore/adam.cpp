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

#include "trajmem/numcore/adam.hpp"

#include <algorithm>
#include <cmath>

namespace trajmem::nc {

template <typename T>
Adam<T>::Adam(TensorList<T> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor<T>& p : params_) {
    m_.emplace_back(p.numel(), T(0));
    v_.emplace_back(p.numel(), T(0));
  }
}

template <typename T>
void Adam<T>::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].requires_grad() || !params_[i].has_grad()) {
      throw ContractError("adam: parameter #" + std::to_string(i) +
                          " has no gradient buffer");
    }
  }
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const T step_size = static_cast<T>(config_.learning_rate / correction1);
  const T root_c2 = static_cast<T>(std::sqrt(correction2));
  const T eps = static_cast<T>(config_.epsilon);
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].data();
    auto g = params_[i].grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = tb1 * m[j] + (T(1) - tb1) * g[j];
      v[j] = tb2 * v[j] + (T(1) - tb2) * g[j] * g[j];
      w[j] -= step_size * m[j] / (std::sqrt(v[j]) / root_c2 + eps);
    }
    params_[i].zero_grad();
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (Tensor<T>& p : params_) p.zero_grad();
}

template <typename T>
void Adam<T>::reset_row(std::size_t param_index, std::size_t row) {
  const Tensor<T>& p = params_.at(param_index);
  if (p.rank() != 2 || row >= p.dim(0)) {
    throw ContractError("adam: reset_row out of range");
  }
  const std::size_t cols = p.dim(1);
  std::fill_n(m_[param_index].begin() + static_cast<std::ptrdiff_t>(row * cols),
              cols, T(0));
  std::fill_n(v_[param_index].begin() + static_cast<std::ptrdiff_t>(row * cols),
              cols, T(0));
}

template class Adam<float>;
template class Adam<double>;

}  // namespace trajmem::nc
