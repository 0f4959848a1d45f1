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

#include "trajmem/numcore/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <memory>
#include <string>

#include "trajmem/numcore/tape.hpp"

namespace trajmem::nc {

AttentionMask::AttentionMask(std::size_t rows, std::size_t cols, bool fill)
    : rows_(rows), cols_(cols), cells_(rows * cols, fill ? 1 : 0) {}

std::size_t AttentionMask::allowed_in_row(std::size_t query) const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < cols_; ++k) n += cells_[query * cols_ + k];
  return n;
}

namespace {

template <typename T>
using RowMatrix =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
MatMap<T> as_matrix(std::span<T> s, std::size_t rows, std::size_t cols,
                    std::size_t offset = 0) {
  return MatMap<T>(s.data() + offset, static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

template <typename T>
ConstMatMap<T> as_matrix(std::span<const T> s, std::size_t rows,
                         std::size_t cols, std::size_t offset = 0) {
  return ConstMatMap<T>(s.data() + offset, static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

template <typename T>
bool tracking(std::initializer_list<const Tensor<T>*> inputs) {
  if (!grad_enabled()) return false;
  for (const Tensor<T>* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

template <typename T, typename Fn>
void record(Fn&& fn) {
  Tape<T>::current().record(std::forward<Fn>(fn));
}

[[noreturn]] void fail(const std::string& op, const std::string& why) {
  throw ContractError(op + ": " + why);
}

void require_rank(const Shape& s, std::size_t rank, const char* op) {
  if (s.size() != rank) {
    fail(op, "expected rank " + std::to_string(rank) + ", got " +
                 shape_str(s));
  }
}

template <typename T>
const Shape& broadcast_shape(const Tensor<T>& a, const Tensor<T>& b,
                             const char* op) {
  if (a.shape() == b.shape()) return a.shape();
  if (b.numel() == 1) return a.shape();
  if (a.numel() == 1) return b.shape();
  fail(op, "incompatible shapes " + shape_str(a.shape()) + " and " +
               shape_str(b.shape()));
}

enum class Binary { kAdd, kSub, kMul };

template <typename T>
Tensor<T> binary(const Tensor<T>& a, const Tensor<T>& b, Binary kind,
                 const char* name) {
  const Shape& shape = broadcast_shape(a, b, name);
  const std::size_t n = shape_numel(shape);
  const bool a_scalar = a.numel() == 1 && n != 1;
  const bool b_scalar = b.numel() == 1 && n != 1;
  auto av = a.data();
  auto bv = b.data();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T x = av[a_scalar ? 0 : i];
    const T y = bv[b_scalar ? 0 : i];
    switch (kind) {
      case Binary::kAdd: out[i] = x + y; break;
      case Binary::kSub: out[i] = x - y; break;
      case Binary::kMul: out[i] = x * y; break;
    }
  }
  const bool track = tracking<T>({&a, &b});
  Tensor<T> result = Tensor<T>::from(shape, std::move(out), track);
  if (track) {
    record<T>([a = a, b = b, result, kind, a_scalar, b_scalar, n]() mutable {
      auto g = result.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        auto bv = b.data();
        for (std::size_t i = 0; i < n; ++i) {
          const T d = kind == Binary::kMul ? g[i] * bv[b_scalar ? 0 : i] : g[i];
          ga[a_scalar ? 0 : i] += d;
        }
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        auto av = a.data();
        for (std::size_t i = 0; i < n; ++i) {
          T d = g[i];
          if (kind == Binary::kSub) d = -d;
          if (kind == Binary::kMul) d = g[i] * av[a_scalar ? 0 : i];
          gb[b_scalar ? 0 : i] += d;
        }
      }
    });
  }
  return result;
}

// Outer/inner extents around `axis` for concat and slice.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a.shape(), 2, "matmul");
  require_rank(b.shape(), 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    fail("matmul", "inner extents differ: " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()));
  }
  const bool track = tracking<T>({&a, &b});
  Tensor<T> out = Tensor<T>::zeros({m, n}, track);
  as_matrix(out.data(), m, n).noalias() =
      as_matrix(a.data(), m, k) * as_matrix(b.data(), k, n);
  if (track) {
    record<T>([a = a, b = b, out, m, k, n]() mutable {
      auto g = as_matrix(std::span<const T>(out.grad()), m, n);
      if (a.requires_grad()) {
        as_matrix(a.grad(), m, k).noalias() +=
            g * as_matrix(b.data(), k, n).transpose();
      }
      if (b.requires_grad()) {
        as_matrix(b.grad(), k, n).noalias() +=
            as_matrix(a.data(), m, k).transpose() * g;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  require_rank(a.shape(), 2, "transpose");
  const std::size_t r = a.dim(0), c = a.dim(1);
  const bool track = tracking<T>({&a});
  Tensor<T> out = Tensor<T>::zeros({c, r}, track);
  as_matrix(out.data(), c, r) = as_matrix(a.data(), r, c).transpose();
  if (track) {
    record<T>([a = a, out, r, c]() mutable {
      as_matrix(a.grad(), r, c) +=
          as_matrix(std::span<const T>(out.grad()), c, r).transpose();
    });
  }
  return out;
}

template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b) {
  require_rank(a.shape(), 3, "bmm");
  require_rank(b.shape(), 3, "bmm");
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  const std::size_t bk = transpose_b ? b.dim(2) : b.dim(1);
  if (b.dim(0) != batch || bk != k) {
    fail("bmm", "incompatible " + shape_str(a.shape()) + " and " +
                    shape_str(b.shape()));
  }
  const std::size_t b_rows = transpose_b ? n : k;
  const std::size_t b_cols = transpose_b ? k : n;
  const bool track = tracking<T>({&a, &b});
  Tensor<T> out = Tensor<T>::zeros({batch, m, n}, track);
  for (std::size_t i = 0; i < batch; ++i) {
    auto am = as_matrix(a.data(), m, k, i * m * k);
    auto bm = as_matrix(b.data(), b_rows, b_cols, i * k * n);
    auto om = as_matrix(out.data(), m, n, i * m * n);
    if (transpose_b) {
      om.noalias() = am * bm.transpose();
    } else {
      om.noalias() = am * bm;
    }
  }
  if (track) {
    record<T>([a = a, b = b, out, batch, m, k, n, b_rows, b_cols, transpose_b]() mutable {
      for (std::size_t i = 0; i < batch; ++i) {
        auto g = as_matrix(std::span<const T>(out.grad()), m, n, i * m * n);
        auto bm = as_matrix(b.data(), b_rows, b_cols, i * k * n);
        if (a.requires_grad()) {
          auto ga = as_matrix(a.grad(), m, k, i * m * k);
          if (transpose_b) {
            ga.noalias() += g * bm;
          } else {
            ga.noalias() += g * bm.transpose();
          }
        }
        if (b.requires_grad()) {
          auto am = as_matrix(a.data(), m, k, i * m * k);
          auto gb = as_matrix(b.grad(), b_rows, b_cols, i * k * n);
          if (transpose_b) {
            gb.noalias() += g.transpose() * am;
          } else {
            gb.noalias() += am.transpose() * g;
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias) {
  if (x.rank() < 1 || bias.rank() != 1 || bias.dim(0) != x.shape().back()) {
    fail("add_bias", "bias " + shape_str(bias.shape()) + " vs input " +
                         shape_str(x.shape()));
  }
  const std::size_t d = bias.dim(0);
  const std::size_t rows = x.numel() / d;
  const bool track = tracking<T>({&x, &bias});
  Tensor<T> out = Tensor<T>::zeros(x.shape(), track);
  auto xv = x.data();
  auto bv = bias.data();
  auto ov = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < d; ++j) ov[r * d + j] = xv[r * d + j] + bv[j];
  }
  if (track) {
    record<T>([x = x, bias = bias, out, rows, d]() mutable {
      auto g = out.grad();
      if (x.requires_grad()) {
        auto gx = x.grad();
        for (std::size_t i = 0; i < rows * d; ++i) gx[i] += g[i];
      }
      if (bias.requires_grad()) {
        auto gb = bias.grad();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < d; ++j) gb[j] += g[r * d + j];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, Binary::kAdd, "add");
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, Binary::kSub, "sub");
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, Binary::kMul, "mul");
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::zeros(x.shape(), track);
  auto xv = x.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] > T(0) ? xv[i] : T(0);
  if (track) {
    record<T>([x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      auto xv = x.data();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (xv[i] > T(0)) gx[i] += g[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::zeros(x.shape(), track);
  auto xv = x.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = factor * xv[i];
  if (track) {
    record<T>([x = x, out, factor]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += factor * g[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = T(0);
  for (T v : x.data()) total += v;
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::scalar(total, track);
  if (track) {
    record<T>([x = x, out]() mutable {
      const T g = out.grad()[0];
      for (T& gx : x.grad()) gx += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return scale(sum(x), T(1) / static_cast<T>(x.numel()));
}

template <typename T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    fail("mse", "shapes " + shape_str(a.shape()) + " and " +
                    shape_str(b.shape()));
  }
  const std::size_t n = a.numel();
  auto av = a.data();
  auto bv = b.data();
  T total = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T d = av[i] - bv[i];
    total += d * d;
  }
  const T inv_n = T(1) / static_cast<T>(n);
  const bool track = tracking<T>({&a, &b});
  Tensor<T> out = Tensor<T>::scalar(total * inv_n, track);
  if (track) {
    record<T>([a = a, b = b, out, n, inv_n]() mutable {
      const T g = out.grad()[0] * T(2) * inv_n;
      auto av = a.data();
      auto bv = b.data();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < n; ++i) ga[i] += g * (av[i] - bv[i]);
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < n; ++i) gb[i] -= g * (av[i] - bv[i]);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> masked_softmax(const Tensor<T>& logits, const AttentionMask& mask) {
  if (logits.rank() < 1) fail("masked_softmax", "rank-0 input");
  const std::size_t cols = logits.shape().back();
  const std::size_t mask_rows =
      logits.rank() >= 2 ? logits.shape()[logits.rank() - 2] : 1;
  if (mask.cols() != cols || mask.rows() != mask_rows) {
    fail("masked_softmax", "mask " + std::to_string(mask.rows()) + "x" +
                               std::to_string(mask.cols()) +
                               " does not fit logits " +
                               shape_str(logits.shape()));
  }
  for (std::size_t r = 0; r < mask_rows; ++r) {
    if (mask.allowed_in_row(r) == 0) {
      fail("masked_softmax", "query row " + std::to_string(r) +
                                 " has no allowed key");
    }
  }
  const std::size_t rows = logits.numel() / cols;
  const bool track = tracking<T>({&logits});
  Tensor<T> out = Tensor<T>::zeros(logits.shape(), track);
  auto x = logits.data();
  auto y = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t q = r % mask_rows;
    const std::size_t base = r * cols;
    T peak = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < cols; ++j) {
      if (mask.allowed(q, j)) peak = std::max(peak, x[base + j]);
    }
    T total = T(0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (mask.allowed(q, j)) {
        y[base + j] = std::exp(x[base + j] - peak);
        total += y[base + j];
      }
    }
    for (std::size_t j = 0; j < cols; ++j) y[base + j] /= total;
  }
  if (track) {
    record<T>([logits = logits, out, rows, cols]() mutable {
      auto g = out.grad();
      auto y = out.data();
      auto gx = logits.grad();
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * cols;
        T dot = T(0);
        for (std::size_t j = 0; j < cols; ++j) dot += y[base + j] * g[base + j];
        for (std::size_t j = 0; j < cols; ++j) {
          gx[base + j] += y[base + j] * (g[base + j] - dot);
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> layernorm(const Tensor<T>& x, const Tensor<T>& gain,
                    const Tensor<T>& bias, T eps) {
  if (x.rank() < 1) fail("layernorm", "rank-0 input");
  const std::size_t d = x.shape().back();
  if (d < 2) fail("layernorm", "normalized axis must have at least 2 entries");
  if (gain.numel() != d || bias.numel() != d) {
    fail("layernorm", "gain/bias must have " + std::to_string(d) + " entries");
  }
  const std::size_t rows = x.numel() / d;
  const bool track = tracking<T>({&x, &gain, &bias});
  Tensor<T> out = Tensor<T>::zeros(x.shape(), track);
  auto normalized = std::make_shared<std::vector<T>>(x.numel());
  auto inv_std = std::make_shared<std::vector<T>>(rows);
  auto xv = x.data();
  auto gv = gain.data();
  auto bv = bias.data();
  auto ov = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * d;
    T mu = T(0);
    for (std::size_t j = 0; j < d; ++j) mu += xv[base + j];
    mu /= static_cast<T>(d);
    T var = T(0);
    for (std::size_t j = 0; j < d; ++j) {
      const T c = xv[base + j] - mu;
      var += c * c;
    }
    var /= static_cast<T>(d);
    const T is = T(1) / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const T xh = (xv[base + j] - mu) * is;
      (*normalized)[base + j] = xh;
      ov[base + j] = xh * gv[j] + bv[j];
    }
  }
  if (track) {
    record<T>([x = x, gain = gain, bias = bias, out, normalized, inv_std, rows, d]() mutable {
      auto g = out.grad();
      auto gv = gain.data();
      const auto& xh = *normalized;
      std::vector<T> dxh(d);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * d;
        if (gain.requires_grad()) {
          auto gg = gain.grad();
          for (std::size_t j = 0; j < d; ++j) gg[j] += g[base + j] * xh[base + j];
        }
        if (bias.requires_grad()) {
          auto gb = bias.grad();
          for (std::size_t j = 0; j < d; ++j) gb[j] += g[base + j];
        }
        if (x.requires_grad()) {
          T mean_dxh = T(0), mean_dxh_xh = T(0);
          for (std::size_t j = 0; j < d; ++j) {
            dxh[j] = g[base + j] * gv[j];
            mean_dxh += dxh[j];
            mean_dxh_xh += dxh[j] * xh[base + j];
          }
          mean_dxh /= static_cast<T>(d);
          mean_dxh_xh /= static_cast<T>(d);
          auto gx = x.grad();
          const T is = (*inv_std)[r];
          for (std::size_t j = 0; j < d; ++j) {
            gx[base + j] +=
                is * (dxh[j] - mean_dxh - xh[base + j] * mean_dxh_xh);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> embedding_lookup(const Tensor<T>& table,
                           std::span<const std::int32_t> ids) {
  require_rank(table.shape(), 2, "embedding_lookup");
  if (ids.empty()) fail("embedding_lookup", "empty id list");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  for (std::int32_t id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      fail("embedding_lookup", "id " + std::to_string(id) + " outside [0, " +
                                   std::to_string(vocab) + ")");
    }
  }
  const bool track = tracking<T>({&table});
  Tensor<T> out = Tensor<T>::zeros({ids.size(), d}, track);
  auto tv = table.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[i] * d), d,
                ov.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  if (track) {
    std::vector<std::int32_t> kept(ids.begin(), ids.end());
    record<T>([table = table, out, kept = std::move(kept), d]() mutable {
      auto g = out.grad();
      auto gt = table.grad();
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t row = static_cast<std::size_t>(kept[i]) * d;
        for (std::size_t j = 0; j < d; ++j) gt[row + j] += g[i * d + j];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits,
                        std::span<const std::int32_t> targets,
                        std::span<const std::type_identity_t<T>> weights) {
  require_rank(logits.shape(), 2, "cross_entropy");
  const std::size_t n = logits.dim(0), classes = logits.dim(1);
  if (targets.size() != n || weights.size() != n) {
    fail("cross_entropy", "need one target and weight per row");
  }
  T weight_total = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= classes) {
      fail("cross_entropy", "target " + std::to_string(targets[i]) +
                                " outside [0, " + std::to_string(classes) +
                                ")");
    }
    if (!(weights[i] >= T(0))) fail("cross_entropy", "negative weight");
    weight_total += weights[i];
  }
  if (weight_total <= T(0)) fail("cross_entropy", "all weights are zero");

  auto x = logits.data();
  auto probs = std::make_shared<std::vector<T>>(n * classes);
  T loss = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = i * classes;
    T peak = x[base];
    for (std::size_t j = 1; j < classes; ++j) peak = std::max(peak, x[base + j]);
    T total = T(0);
    for (std::size_t j = 0; j < classes; ++j) {
      (*probs)[base + j] = std::exp(x[base + j] - peak);
      total += (*probs)[base + j];
    }
    for (std::size_t j = 0; j < classes; ++j) (*probs)[base + j] /= total;
    const T log_z = peak + std::log(total);
    loss += weights[i] * (log_z - x[base + static_cast<std::size_t>(targets[i])]);
  }
  loss /= weight_total;

  const bool track = tracking<T>({&logits});
  Tensor<T> out = Tensor<T>::scalar(loss, track);
  if (track) {
    std::vector<std::int32_t> kept_targets(targets.begin(), targets.end());
    std::vector<T> kept_weights(weights.begin(), weights.end());
    record<T>([logits = logits, out, probs, kept_targets = std::move(kept_targets), kept_weights = std::move(kept_weights), n, classes, weight_total]() mutable {
      const T g = out.grad()[0] / weight_total;
      auto gx = logits.grad();
      for (std::size_t i = 0; i < n; ++i) {
        const T w = g * kept_weights[i];
        if (w == T(0)) continue;
        const std::size_t base = i * classes;
        for (std::size_t j = 0; j < classes; ++j) {
          gx[base + j] += w * (*probs)[base + j];
        }
        gx[base + static_cast<std::size_t>(kept_targets[i])] -= w;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    fail("reshape", shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::from(
      std::move(shape), std::vector<T>(x.data().begin(), x.data().end()),
      track);
  if (track) {
    record<T>([x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> swap_axes12(const Tensor<T>& x) {
  require_rank(x.shape(), 4, "swap_axes12");
  const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2), d = x.dim(3);
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::zeros({a, c, b, d}, track);
  auto src = x.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      for (std::size_t k = 0; k < c; ++k) {
        const std::size_t from = ((i * b + j) * c + k) * d;
        const std::size_t to = ((i * c + k) * b + j) * d;
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), d,
                    dst.begin() + static_cast<std::ptrdiff_t>(to));
      }
    }
  }
  if (track) {
    record<T>([x = x, out, a = a, b = b, c, d]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
          for (std::size_t k = 0; k < c; ++k) {
            const std::size_t from = ((i * b + j) * c + k) * d;
            const std::size_t to = ((i * c + k) * b + j) * d;
            for (std::size_t e = 0; e < d; ++e) gx[from + e] += g[to + e];
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) fail("concat", "no inputs");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) fail("concat", "axis out of range");
  Shape shape = first;
  shape[axis] = 0;
  bool track = false;
  for (const Tensor<T>& p : parts) {
    if (p.rank() != first.size()) fail("concat", "rank mismatch");
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (i != axis && p.dim(i) != first[i]) {
        fail("concat", shape_str(p.shape()) + " vs " + shape_str(first));
      }
    }
    shape[axis] += p.dim(axis);
    track = track || (grad_enabled() && p.requires_grad());
  }
  const AxisSplit split = split_at(shape, axis);
  Tensor<T> out = Tensor<T>::zeros(shape, track);
  auto dst = out.data();
  const std::size_t row = shape[axis] * split.inner;
  std::size_t offset = 0;
  for (const Tensor<T>& p : parts) {
    const std::size_t chunk = p.dim(axis) * split.inner;
    auto src = p.data();
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(o * chunk), chunk,
                  dst.begin() + static_cast<std::ptrdiff_t>(o * row + offset));
    }
    offset += chunk;
  }
  if (track) {
    record<T>([parts = parts, out, axis, split, row]() mutable {
      auto g = out.grad();
      std::size_t offset = 0;
      for (Tensor<T>& p : parts) {
        const std::size_t chunk = p.dim(axis) * split.inner;
        if (p.requires_grad()) {
          auto gp = p.grad();
          for (std::size_t o = 0; o < split.outer; ++o) {
            for (std::size_t e = 0; e < chunk; ++e) {
              gp[o * chunk + e] += g[o * row + offset + e];
            }
          }
        }
        offset += chunk;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start,
                std::size_t length) {
  if (axis >= x.rank() || length == 0 || start + length > x.dim(axis)) {
    fail("slice", "range [" + std::to_string(start) + ", +" +
                      std::to_string(length) + ") on axis " +
                      std::to_string(axis) + " of " + shape_str(x.shape()));
  }
  Shape shape = x.shape();
  shape[axis] = length;
  const AxisSplit split = split_at(shape, axis);
  const std::size_t src_row = x.dim(axis) * split.inner;
  const std::size_t chunk = length * split.inner;
  const std::size_t offset = start * split.inner;
  const bool track = tracking<T>({&x});
  Tensor<T> out = Tensor<T>::zeros(shape, track);
  auto src = x.data();
  auto dst = out.data();
  for (std::size_t o = 0; o < split.outer; ++o) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(o * src_row + offset),
                chunk, dst.begin() + static_cast<std::ptrdiff_t>(o * chunk));
  }
  if (track) {
    record<T>([x = x, out, split, src_row, chunk, offset]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t o = 0; o < split.outer; ++o) {
        for (std::size_t e = 0; e < chunk; ++e) {
          gx[o * src_row + offset + e] += g[o * chunk + e];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> detach(const Tensor<T>& x) {
  return Tensor<T>::from(x.shape(),
                         std::vector<T>(x.data().begin(), x.data().end()));
}

template <typename T>
Tensor<T> straight_through(const Tensor<T>& continuous,
                           const Tensor<T>& quantized) {
  if (continuous.shape() != quantized.shape()) {
    fail("straight_through", shape_str(continuous.shape()) + " vs " +
                                 shape_str(quantized.shape()));
  }
  const bool track = tracking<T>({&continuous});
  Tensor<T> out = Tensor<T>::from(
      quantized.shape(),
      std::vector<T>(quantized.data().begin(), quantized.data().end()), track);
  if (track) {
    record<T>([continuous = continuous, out]() mutable {
      auto g = out.grad();
      auto gc = continuous.grad();
      for (std::size_t i = 0; i < gc.size(); ++i) gc[i] += g[i];
    });
  }
  return out;
}

#define TRAJMEM_INSTANTIATE_OPS(T)                                            \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> transpose(const Tensor<T>&);                             \
  template Tensor<T> bmm(const Tensor<T>&, const Tensor<T>&, bool);           \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> relu(const Tensor<T>&);                                  \
  template Tensor<T> scale(const Tensor<T>&, T);                              \
  template Tensor<T> sum(const Tensor<T>&);                                   \
  template Tensor<T> mean(const Tensor<T>&);                                  \
  template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> masked_softmax(const Tensor<T>&, const AttentionMask&);  \
  template Tensor<T> layernorm(const Tensor<T>&, const Tensor<T>&,            \
                               const Tensor<T>&, T);                          \
  template Tensor<T> embedding_lookup(const Tensor<T>&,                       \
                                      std::span<const std::int32_t>);         \
  template Tensor<T> cross_entropy(const Tensor<T>&,                          \
                                   std::span<const std::int32_t>,             \
                                   std::span<const std::type_identity_t<T>>);                       \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                        \
  template Tensor<T> swap_axes12(const Tensor<T>&);                           \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, std::size_t);      \
  template Tensor<T> slice(const Tensor<T>&, std::size_t, std::size_t,        \
                           std::size_t);                                      \
  template Tensor<T> detach(const Tensor<T>&);                                \
  template Tensor<T> straight_through(const Tensor<T>&, const Tensor<T>&);

TRAJMEM_INSTANTIATE_OPS(float)
TRAJMEM_INSTANTIATE_OPS(double)

#undef TRAJMEM_INSTANTIATE_OPS

}  // namespace trajmem::nc
