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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajmem::nc {

// Raised when an operation's preconditions are violated (shape mismatch,
// out-of-range index, fully blocked softmax row, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
struct TensorStorage {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty unless requires_grad
  bool requires_grad = false;
};

// Reference-counted handle to a dense row-major array. Copies share storage;
// use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> values,
                     bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return storage_ != nullptr; }
  bool same_storage(const Tensor& other) const {
    return storage_ == other.storage_;
  }

  const Shape& shape() const { return storage_->shape; }
  std::size_t rank() const { return storage_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return storage_->shape.at(axis); }
  std::size_t numel() const { return storage_->data.size(); }

  std::span<T> data() { return storage_->data; }
  std::span<const T> data() const { return storage_->data; }
  std::span<T> grad() { return storage_->grad; }
  std::span<const T> grad() const { return storage_->grad; }
  bool has_grad() const { return !storage_->grad.empty(); }

  T& operator[](std::size_t i) { return storage_->data[i]; }
  const T& operator[](std::size_t i) const { return storage_->data[i]; }
  T item() const;

  bool requires_grad() const { return storage_->requires_grad; }
  // Turning gradients on allocates a zeroed accumulator; turning them off
  // drops it.
  void set_requires_grad(bool on);
  void zero_grad();

  Tensor clone() const;
  // Same values, different precision. Gradient state is not carried over.
  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> values(numel());
    for (std::size_t i = 0; i < numel(); ++i) {
      values[i] = static_cast<U>(storage_->data[i]);
    }
    return Tensor<U>::from(shape(), std::move(values), requires_grad());
  }

  // Overwrites values in place (shape must match). Does not touch grad.
  void assign(std::span<const T> values);

 private:
  explicit Tensor(std::shared_ptr<TensorStorage<T>> storage)
      : storage_(std::move(storage)) {}

  std::shared_ptr<TensorStorage<T>> storage_;
};

template <typename T>
using TensorList = std::vector<Tensor<T>>;

}  // namespace trajmem::nc
