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

#include "trajmem/numcore/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "trajmem/numcore/tape.hpp"

namespace trajmem::nc {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> values,
                          bool requires_grad) {
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw ContractError("tensor extents must be positive, got " +
                          shape_str(shape));
    }
  }
  if (shape_numel(shape) != values.size()) {
    throw ContractError("shape " + shape_str(shape) + " does not hold " +
                        std::to_string(values.size()) + " values");
  }
  auto storage = std::make_shared<TensorStorage<T>>();
  storage->shape = std::move(shape);
  storage->data = std::move(values);
  Tensor t(std::move(storage));
  t.set_requires_grad(requires_grad);
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) {
    throw ContractError("item() on tensor of shape " + shape_str(shape()));
  }
  return storage_->data[0];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool on) {
  storage_->requires_grad = on;
  if (on) {
    storage_->grad.assign(storage_->data.size(), T(0));
  } else {
    storage_->grad.clear();
    storage_->grad.shrink_to_fit();
  }
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(storage_->grad.begin(), storage_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  return from(shape(), storage_->data, requires_grad());
}

template <typename T>
void Tensor<T>::assign(std::span<const T> values) {
  if (values.size() != numel()) {
    throw ContractError("assign: size mismatch");
  }
  std::copy(values.begin(), values.end(), storage_->data.begin());
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace trajmem::nc
