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

// Acceptance runner. Prints one PASS/FAIL line per criterion; indented lines
// above it carry the measurements behind the verdict. Exit status is 0 only
// when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "test_util.hpp"
#include "trajmem/cli/config.hpp"
#include "trajmem/data/synth.hpp"
#include "trajmem/eval/ablation.hpp"
#include "trajmem/eval/bench.hpp"
#include "trajmem/eval/report.hpp"
#include "trajmem/numcore/grad_check.hpp"
#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/tape.hpp"
#include "trajmem/seqlm/model.hpp"
#include "trajmem/seqlm/sample.hpp"
#include "trajmem/vqmem/model.hpp"
#include "trajmem/vqmem/train.hpp"

namespace trajmem::acceptance {
namespace {

namespace fs = std::filesystem;
using nc::Tensor;
using TensorD = Tensor<double>;
using testing::probe_weights;
using testing::random_ids;
using testing::random_tensor;

// Pinned bounds.
constexpr double kGradTolerance = 1e-4;
constexpr std::size_t kGradCases = 100;
constexpr double kGradSeconds = 120;
constexpr double kOpStep = 1e-5;
// Whole models contain ReLU kinks at data-dependent places; a shorter step
// makes a central difference straddling one far less likely.
constexpr double kModelStep = 1e-6;
constexpr std::size_t kQuantizerCases = 1000;
constexpr double kQuantizerSeconds = 5;
constexpr std::size_t kStopGradCases = 100;
constexpr std::size_t kMaxMaskSide = 16;
constexpr std::size_t kProbeTrials = 200;
constexpr double kMaskSeconds = 30;
constexpr std::size_t kFactorizationSequences = 100;
constexpr double kFactorizationTolerance = 1e-6;
constexpr double kIncrementalTolerance = 1e-5;
constexpr double kReconstructionBound = 0.05;
constexpr std::size_t kMaxVqEpochs = 50;
constexpr std::size_t kMaxLmEpochs = 100;
constexpr double kEndToEndSeconds = 30 * 60;
constexpr double kSweepSeconds = 2 * 60 * 60;
constexpr std::size_t kEntryBytes = 4;
constexpr double kSoftMaskRatio = 1.1;
constexpr double kLatencyP50Ms = 5.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void note(const std::string& line) { std::cout << "    " << line << '\n'; }

TensorD weighted(const TensorD& y, const TensorD& w) {
  return nc::sum(nc::mul(y, w));
}

std::size_t between(nc::Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// ---------------------------------------------------------------------------
// 1. Gradient suite.

struct GradCase {
  std::function<TensorD()> loss;
  nc::TensorList<double> params;
};

using CaseFactory = std::function<GradCase(nc::Rng&)>;

GradCase weighted_case(const TensorD& probe_shape_src,
                       std::function<TensorD()> op, nc::TensorList<double> in,
                       nc::Rng& rng) {
  auto w = probe_weights<double>(probe_shape_src.shape(), rng);
  return {[op, w] { return weighted(op(), w); }, std::move(in)};
}

// Builds the weighted case after one forward pass to learn the output shape.
GradCase make_case(std::function<TensorD()> op, nc::TensorList<double> in,
                   nc::Rng& rng) {
  TensorD shape_probe;
  {
    nc::NoGradGuard no_grad;
    shape_probe = op();
  }
  return weighted_case(shape_probe, std::move(op), std::move(in), rng);
}

nc::AttentionMask random_mask(std::size_t rows, std::size_t cols,
                              nc::Rng& rng) {
  nc::AttentionMask mask(rows, cols, false);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) mask.set(i, j, rng.below(2) == 1);
    mask.set(i, rng.below(cols), true);
  }
  return mask;
}

std::vector<std::pair<std::string, CaseFactory>> op_factories() {
  std::vector<std::pair<std::string, CaseFactory>> ops;
  ops.emplace_back("matmul", [](nc::Rng& rng) {
    const auto m = between(rng, 1, 4), k = between(rng, 1, 4),
               n = between(rng, 1, 4);
    auto a = random_tensor({m, k}, rng), b = random_tensor({k, n}, rng);
    return make_case([=] { return nc::matmul(a, b); }, {a, b}, rng);
  });
  ops.emplace_back("transpose", [](nc::Rng& rng) {
    auto a = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
    return make_case([=] { return nc::transpose(a); }, {a}, rng);
  });
  ops.emplace_back("bmm", [](nc::Rng& rng) {
    const auto bt = between(rng, 1, 3), m = between(rng, 1, 3),
               k = between(rng, 1, 3), n = between(rng, 1, 3);
    auto a = random_tensor({bt, m, k}, rng), b = random_tensor({bt, k, n}, rng);
    return make_case([=] { return nc::bmm(a, b); }, {a, b}, rng);
  });
  ops.emplace_back("bmm_transpose_b", [](nc::Rng& rng) {
    const auto bt = between(rng, 1, 3), m = between(rng, 1, 3),
               k = between(rng, 1, 3), n = between(rng, 1, 3);
    auto a = random_tensor({bt, m, k}, rng), b = random_tensor({bt, n, k}, rng);
    return make_case([=] { return nc::bmm(a, b, true); }, {a, b}, rng);
  });
  ops.emplace_back("add_bias", [](nc::Rng& rng) {
    const auto d = between(rng, 1, 5);
    auto x = random_tensor({between(rng, 1, 3), between(rng, 1, 3), d}, rng);
    auto b = random_tensor({d}, rng);
    return make_case([=] { return nc::add_bias(x, b); }, {x, b}, rng);
  });
  for (const char* name : {"add", "sub", "mul"}) {
    const std::string op = name;
    ops.emplace_back(op, [op](nc::Rng& rng) {
      const nc::Shape s{between(rng, 1, 4), between(rng, 1, 4)};
      auto a = random_tensor(s, rng), b = random_tensor(s, rng);
      return make_case(
          [=] {
            if (op == "add") return nc::add(a, b);
            if (op == "sub") return nc::sub(a, b);
            return nc::mul(a, b);
          },
          {a, b}, rng);
    });
  }
  ops.emplace_back("relu", [](nc::Rng& rng) {
    // Inputs at least 0.1 away from the kink.
    auto x = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng, 0.1,
                           1.0);
    for (double& v : x.data()) {
      if (rng.below(2) == 1) v = -v;
    }
    return make_case([=] { return nc::relu(x); }, {x}, rng);
  });
  ops.emplace_back("scale", [](nc::Rng& rng) {
    auto x = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
    const double f = rng.uniform(-2.0, 2.0);
    return make_case([=] { return nc::scale(x, f); }, {x}, rng);
  });
  ops.emplace_back("sum", [](nc::Rng& rng) {
    auto x = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
    return GradCase{[=] { return nc::scale(nc::sum(x), 0.7); }, {x}};
  });
  ops.emplace_back("mean", [](nc::Rng& rng) {
    auto x = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
    return GradCase{[=] { return nc::mean(x); }, {x}};
  });
  ops.emplace_back("mse", [](nc::Rng& rng) {
    const nc::Shape s{between(rng, 1, 4), between(rng, 1, 4)};
    auto a = random_tensor(s, rng), b = random_tensor(s, rng);
    return GradCase{[=] { return nc::mse(a, b); }, {a, b}};
  });
  ops.emplace_back("masked_softmax", [](nc::Rng& rng) {
    const auto r = between(rng, 1, 4), c = between(rng, 1, 4);
    auto x = random_tensor({between(rng, 1, 3), r, c}, rng, -3, 3);
    const auto mask = random_mask(r, c, rng);
    return make_case([=] { return nc::masked_softmax(x, mask); }, {x}, rng);
  });
  ops.emplace_back("layernorm", [](nc::Rng& rng) {
    const auto d = between(rng, 2, 6);
    auto x = random_tensor({between(rng, 1, 4), d}, rng, -2, 2);
    auto g = random_tensor({d}, rng, 0.5, 1.5), b = random_tensor({d}, rng);
    return make_case([=] { return nc::layernorm(x, g, b); }, {x, g, b}, rng);
  });
  ops.emplace_back("embedding_lookup", [](nc::Rng& rng) {
    const auto v = between(rng, 2, 6);
    auto table = random_tensor({v, between(rng, 1, 4)}, rng);
    const auto ids = random_ids(between(rng, 1, 8), v, rng);
    return make_case([=] { return nc::embedding_lookup<double>(table, ids); },
                     {table}, rng);
  });
  ops.emplace_back("cross_entropy", [](nc::Rng& rng) {
    const auto n = between(rng, 1, 5), v = between(rng, 2, 6);
    auto logits = random_tensor({n, v}, rng, -2, 2);
    const auto targets = random_ids(n, v, rng);
    std::vector<double> weights(n);
    for (double& w : weights) w = rng.uniform(0.1, 1.0);
    return GradCase{
        [=] { return nc::cross_entropy<double>(logits, targets, weights); },
        {logits}};
  });
  ops.emplace_back("reshape", [](nc::Rng& rng) {
    const auto a = between(rng, 1, 3), b = between(rng, 1, 3),
               c = between(rng, 1, 3);
    auto x = random_tensor({a, b, c}, rng);
    return make_case([=] { return nc::reshape(x, {c, a * b}); }, {x}, rng);
  });
  ops.emplace_back("swap_axes12", [](nc::Rng& rng) {
    auto x = random_tensor({between(rng, 1, 2), between(rng, 1, 3),
                            between(rng, 1, 3), between(rng, 1, 3)},
                           rng);
    return make_case([=] { return nc::swap_axes12(x); }, {x}, rng);
  });
  ops.emplace_back("concat", [](nc::Rng& rng) {
    const std::size_t rank = between(rng, 1, 3);
    const std::size_t axis = rng.below(rank);
    nc::Shape base(rank);
    for (auto& d : base) d = between(rng, 1, 3);
    std::vector<TensorD> parts;
    const std::size_t count = between(rng, 2, 3);
    for (std::size_t i = 0; i < count; ++i) {
      nc::Shape s = base;
      s[axis] = between(rng, 1, 3);
      parts.push_back(random_tensor(s, rng));
    }
    return make_case([=] { return nc::concat<double>(parts, axis); },
                     nc::TensorList<double>(parts.begin(), parts.end()), rng);
  });
  ops.emplace_back("slice", [](nc::Rng& rng) {
    const std::size_t rank = between(rng, 1, 3);
    const std::size_t axis = rng.below(rank);
    nc::Shape s(rank);
    for (auto& d : s) d = between(rng, 1, 4);
    auto x = random_tensor(s, rng);
    const std::size_t start = rng.below(s[axis]);
    const std::size_t length = between(rng, 1, s[axis] - start);
    return make_case([=] { return nc::slice(x, axis, start, length); }, {x},
                     rng);
  });
  return ops;
}

// Scalar network over a tiny VQ model: the loss with every stop-gradient
// operand pinned to its base-point value, so finite differences see exactly
// the straight-through estimator.
GradCase vq_surrogate_case(nc::Rng& rng) {
  vqmem::VQConfig c;
  c.codebook_size = between(rng, 3, 6);
  c.entry_dim = between(rng, 2, 4);
  c.hidden = between(rng, 3, 6);
  c.observed = 4;
  c.predicted = 4;
  c.beta = rng.uniform(0.1, 1.0);
  auto params = std::make_shared<vqmem::VQParams<double>>(
      vqmem::VQParams<double>::init(c, rng));
  data::SynthConfig sc;
  sc.count = between(rng, 1, 2);
  sc.observed = c.observed;
  sc.predicted = c.predicted;
  auto items = std::make_shared<std::vector<data::Trajectory>>(
      vqmem::normalize_all(data::synth_generate(nc::Rng(rng.next_u64()), sc),
                           false));
  auto batch = std::make_shared<vqmem::Batch>();
  for (const auto& t : *items) batch->push_back(&t);
  TensorD va0, vq0;
  std::vector<std::int32_t> frozen;
  {
    nc::NoGradGuard no_grad;
    auto base = vqmem::vq_losses(*params, *batch);
    frozen = base.indices;
    va0 = base.v_a.clone();
    vq0 = base.v_q.clone();
  }
  const TensorD target =
      nc::reshape(vqmem::window_rows<double>(*batch, vqmem::Segment::kBoth, c),
                  {batch->size() * c.length(), 2});
  auto loss = [=] {
    TensorD v_a = vqmem::encode(*params, *batch, vqmem::Segment::kBoth);
    TensorD v_q = nc::embedding_lookup<double>(params->memory.entries, frozen);
    TensorD decoded = vqmem::decode(*params, nc::add(vq0, nc::sub(v_a, va0)),
                                    batch->size());
    return nc::add(nc::add(nc::mse(decoded, target), nc::mse(va0, v_q)),
                   nc::scale(nc::mse(v_a, vq0), c.beta));
  };
  // Keep the trajectories alive as long as the closure.
  auto keep = [loss, items] { return loss(); };
  return {keep, nc::tensors_of(params->named_parameters())};
}

GradCase lm_loss_case(nc::Rng& rng) {
  seqlm::LMConfig c;
  c.vocab = between(rng, 3, 8);
  c.d_model = 4;
  c.heads = between(rng, 1, 2);
  c.layers = 1;
  c.ff = between(rng, 3, 6);
  c.observed = between(rng, 1, 3);
  c.future = between(rng, 1, 3);
  c.mask = rng.below(2) ? seqlm::MaskKind::kCausal : seqlm::MaskKind::kSemiCausal;
  auto params = std::make_shared<seqlm::LMParams<double>>(
      seqlm::LMParams<double>::init(c, rng));
  auto seqs = std::make_shared<std::vector<seqlm::TokenSequence>>();
  const std::size_t count = between(rng, 1, 3);
  for (std::size_t i = 0; i < count; ++i) {
    seqs->push_back({random_ids(c.observed + c.future, c.vocab, rng),
                     c.observed, c.future});
  }
  auto loss = [=] {
    std::vector<const seqlm::TokenSequence*> batch;
    for (const auto& s : *seqs) batch.push_back(&s);
    return seqlm::lm_loss(*params, batch);
  };
  return {loss, nc::tensors_of(params->named_parameters())};
}

// Exact contracts of the two non-differentiable helpers.
bool detach_contract(nc::Rng& rng) {
  auto x = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
  auto y = random_tensor(x.shape(), rng);
  auto d = nc::detach(x);
  if (d.requires_grad() || d.same_storage(x)) return false;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    if (d[i] != x[i]) return false;
  }
  auto loss = nc::add(nc::sum(nc::mul(d, y)), nc::sum(nc::mul(x, x)));
  nc::backward(loss);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    // Only the undetached path contributes.
    if (x.grad()[i] != 2 * x[i] || y.grad()[i] != d[i]) return false;
  }
  return true;
}

bool straight_through_contract(nc::Rng& rng) {
  auto cont = random_tensor({between(rng, 1, 4), between(rng, 1, 4)}, rng);
  auto quant = random_tensor(cont.shape(), rng);
  auto w = probe_weights<double>(cont.shape(), rng);
  auto out = nc::straight_through(cont, quant);
  for (std::size_t i = 0; i < out.numel(); ++i) {
    if (out[i] != quant[i]) return false;
  }
  auto loss = weighted(out, w);
  nc::backward(loss);
  for (std::size_t i = 0; i < out.numel(); ++i) {
    if (cont.grad()[i] != w[i] || quant.grad()[i] != 0.0) return false;
  }
  return true;
}

Outcome gradient_suite() {
  Stopwatch clock;
  nc::GradCheckOptions options;
  options.tolerance = kGradTolerance;
  bool all = true;
  auto run = [&](const std::string& name, const CaseFactory& factory,
                 nc::Rng rng, double step) {
    options.step = step;
    double worst = 0;
    std::size_t failed = 0;
    std::string worst_at;
    for (std::size_t i = 0; i < kGradCases; ++i) {
      const GradCase c = factory(rng);
      const auto r = nc::grad_check<double>(c.loss, c.params, options);
      if (!r.passed) ++failed;
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        worst_at = r.worst;
      }
    }
    note(name + ": cases=" + std::to_string(kGradCases) +
         " failed=" + std::to_string(failed) + " max_rel=" + fmt(worst, 3));
    if (failed > 0) {
      note("  worst " + worst_at);
      all = false;
    }
  };
  std::uint64_t stream = 0;
  for (const auto& [name, factory] : op_factories()) {
    run(name, factory, nc::Rng(101).fork(stream++), kOpStep);
  }
  run("vq_loss(frozen assignments)", vq_surrogate_case,
      nc::Rng(101).fork(stream++), kModelStep);
  run("lm_loss", lm_loss_case, nc::Rng(101).fork(stream++), kModelStep);

  nc::Rng rng = nc::Rng(101).fork(stream++);
  std::size_t detach_ok = 0, st_ok = 0;
  for (std::size_t i = 0; i < kGradCases; ++i) {
    detach_ok += detach_contract(rng) ? 1 : 0;
    st_ok += straight_through_contract(rng) ? 1 : 0;
  }
  note("detach exact contract: " + std::to_string(detach_ok) + "/" +
       std::to_string(kGradCases));
  note("straight_through exact contract: " + std::to_string(st_ok) + "/" +
       std::to_string(kGradCases));
  all = all && detach_ok == kGradCases && st_ok == kGradCases;
  const double secs = clock.seconds();
  const bool fast = secs < kGradSeconds;
  return {all && fast, "tolerance " + fmt(kGradTolerance) + ", runtime " +
                           fmt(secs, 3) + " s (limit " + fmt(kGradSeconds) +
                           " s)"};
}

// ---------------------------------------------------------------------------
// 2. Quantizer oracle.

std::int32_t brute_nearest(const TensorD& entries, std::span<const double> q) {
  const std::size_t k = entries.dim(0), d = entries.dim(1);
  std::int32_t best = 0;
  double best_dist = 0;
  for (std::size_t e = 0; e < k; ++e) {
    double dist = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = q[j] - entries[e * d + j];
      dist += diff * diff;
    }
    if (e == 0 || dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::int32_t>(e);
    }
  }
  return best;
}

Outcome quantizer_oracle() {
  Stopwatch clock;
  nc::Rng rng(202);
  std::size_t mismatches = 0, queries = 0, tie_queries = 0;
  for (std::size_t trial = 0; trial < kQuantizerCases; ++trial) {
    const std::size_t k = between(rng, 2, 64), d = between(rng, 1, 16),
                      n = between(rng, 1, 8);
    const int kind = static_cast<int>(trial % 3);
    auto memory = vqmem::MemoryArray<double>::init(k, d, rng);
    auto v_a = random_tensor({n, d}, rng, -0.2, 0.2, false);
    if (kind == 1) {
      // Small integer grid: squared distances are exact and ties abound.
      for (double& v : memory.entries.data()) v = double(rng.below(3)) - 1.0;
      for (double& v : v_a.data()) v = double(rng.below(3)) - 1.0;
    } else if (kind == 2) {
      // Duplicate entries, queries placed on or near the duplicates.
      for (std::size_t e = 1; e < k; e += 2) {
        const std::size_t src = rng.below(e);
        for (std::size_t j = 0; j < d; ++j) {
          memory.entries[e * d + j] = memory.entries[src * d + j];
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = rng.below(k);
        for (std::size_t j = 0; j < d; ++j) {
          v_a[i * d + j] = memory.entries[e * d + j] +
                           (rng.below(2) ? 0.0 : rng.uniform(-1e-3, 1e-3));
        }
      }
    }
    const auto quantized = vqmem::quantize(memory, v_a);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = v_a.data().subspan(i * d, d);
      const std::int32_t want = brute_nearest(memory.entries, row);
      ++queries;
      // Count queries whose minimum distance is shared by several entries.
      double best = 0;
      std::size_t holders = 0;
      for (std::size_t e = 0; e < k; ++e) {
        double dist = 0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = row[j] - memory.entries[e * d + j];
          dist += diff * diff;
        }
        if (e == 0 || dist < best) {
          best = dist;
          holders = 1;
        } else if (dist == best) {
          ++holders;
        }
      }
      if (holders > 1) ++tie_queries;
      bool ok = quantized.indices[i] == want;
      for (std::size_t j = 0; j < d && ok; ++j) {
        ok = quantized.v_q[i * d + j] == memory.entries[want * d + j];
      }
      if (!ok) ++mismatches;
    }
  }
  const double secs = clock.seconds();
  note("cases=" + std::to_string(kQuantizerCases) + " queries=" +
       std::to_string(queries) + " tied queries=" + std::to_string(tie_queries) +
       " mismatches=" + std::to_string(mismatches));
  return {mismatches == 0 && tie_queries > 0 && secs < kQuantizerSeconds,
          "exact match, runtime " + fmt(secs, 3) + " s (limit " +
              fmt(kQuantizerSeconds) + " s)"};
}

// ---------------------------------------------------------------------------
// 3. Stop-gradient contract.

Outcome stop_gradient_contract() {
  nc::Rng rng(303);
  std::size_t violations = 0, vacuous = 0;
  for (std::size_t trial = 0; trial < kStopGradCases; ++trial) {
    vqmem::VQConfig c;
    c.codebook_size = between(rng, 2, 16);
    c.entry_dim = between(rng, 2, 8);
    c.hidden = between(rng, 4, 12);
    c.beta = rng.uniform(0.1, 1.0);
    auto params = vqmem::VQParams<double>::init(c, rng);
    data::SynthConfig sc;
    sc.count = between(rng, 1, 3);
    const auto items = vqmem::normalize_all(
        data::synth_generate(nc::Rng(rng.next_u64()), sc), rng.below(2) == 1);
    vqmem::Batch batch;
    for (const auto& t : items) batch.push_back(&t);

    nc::NamedTensors<double> enc_named;
    params.encoder_past.collect("", enc_named);
    params.encoder_future.collect("", enc_named);
    const auto encoders = nc::tensors_of(enc_named);
    auto all = nc::tensors_of(params.named_parameters());
    auto reset = [&] {
      for (auto& p : all) p.zero_grad();
    };
    auto max_abs = [](const nc::TensorList<double>& list) {
      double m = 0;
      for (const auto& p : list) {
        for (double g : p.grad()) m = std::max(m, std::abs(g));
      }
      return m;
    };

    reset();
    auto out = vqmem::vq_losses(params, batch);
    nc::backward(out.codebook);
    if (max_abs(encoders) != 0.0) ++violations;
    if (max_abs({params.memory.entries}) == 0.0) ++vacuous;

    reset();
    out = vqmem::vq_losses(params, batch);
    nc::backward(out.commitment);
    if (max_abs({params.memory.entries}) != 0.0) ++violations;
    if (max_abs(encoders) == 0.0) ++vacuous;
  }
  note("cases=" + std::to_string(kStopGradCases) + " nonzero blocked grads=" +
       std::to_string(violations) + " cases with no signal on the open path=" +
       std::to_string(vacuous));
  return {violations == 0 && vacuous == 0,
          "codebook term -> encoders and commitment term -> memory exactly 0"};
}

// ---------------------------------------------------------------------------
// 4. Mask semantics.

Outcome mask_semantics() {
  Stopwatch clock;
  std::size_t cells = 0, wrong = 0;
  for (std::size_t o = 1; o <= kMaxMaskSide; ++o) {
    for (std::size_t p = 1; p <= kMaxMaskSide; ++p) {
      const auto mask = seqlm::build_mask(o, p);
      if (mask.rows() != o + p || mask.cols() != o + p) {
        ++wrong;
        continue;
      }
      for (std::size_t i = 0; i < o + p; ++i) {
        for (std::size_t j = 0; j < o + p; ++j) {
          ++cells;
          if (mask.allowed(i, j) != (j < o || j <= i)) ++wrong;
        }
      }
    }
  }
  note("exhaustive o,p in [1," + std::to_string(kMaxMaskSide) +
       "]: cells=" + std::to_string(cells) + " wrong=" + std::to_string(wrong));

  // Causality probe: changing a future token never moves an earlier row.
  nc::Rng rng(404);
  std::size_t moved = 0;
  for (std::size_t trial = 0; trial < kProbeTrials; ++trial) {
    seqlm::LMConfig c;
    c.vocab = between(rng, 3, 12);
    c.d_model = 8;
    c.heads = 2;
    c.layers = between(rng, 1, 3);
    c.ff = 12;
    c.observed = between(rng, 1, 5);
    c.future = between(rng, 1, 6);
    c.mask = trial % 2 ? seqlm::MaskKind::kCausal : seqlm::MaskKind::kSemiCausal;
    const auto params = seqlm::LMParams<double>::init(c, rng);
    auto tokens = random_ids(c.observed + c.future, c.vocab, rng);
    nc::NoGradGuard no_grad;
    const auto base = seqlm::forward_logits(params, tokens, c.observed);
    const std::size_t t = c.observed + rng.below(c.future);
    tokens[t] = static_cast<std::int32_t>(
        (tokens[t] + 1 + rng.below(c.vocab - 1)) % c.vocab);
    const auto changed = seqlm::forward_logits(params, tokens, c.observed);
    for (std::size_t i = 0; i < t * c.vocab; ++i) {
      if (base[i] != changed[i]) {
        ++moved;
        break;
      }
    }
  }
  const double secs = clock.seconds();
  note("causality probe: trials=" + std::to_string(kProbeTrials) +
       " with an earlier row changed=" + std::to_string(moved));
  return {wrong == 0 && moved == 0 && secs < kMaskSeconds,
          "runtime " + fmt(secs, 3) + " s (limit " + fmt(kMaskSeconds) +
              " s)"};
}

// ---------------------------------------------------------------------------
// 5. Likelihood factorization and incremental decoding.

long double log_softmax_at(std::span<const double> row, std::int32_t k) {
  long double peak = row[0];
  for (double v : row) peak = std::max<long double>(peak, v);
  long double total = 0;
  for (double v : row) total += std::exp(static_cast<long double>(v) - peak);
  return row[k] - peak - std::log(total);
}

Outcome likelihood_factorization() {
  nc::Rng rng(505);
  double worst_factor = 0, worst_incremental = 0;
  nc::NoGradGuard no_grad;
  for (std::size_t i = 0; i < kFactorizationSequences; ++i) {
    seqlm::LMConfig c;
    c.vocab = between(rng, 4, 64);
    c.observed = between(rng, 1, 6);
    c.future = between(rng, 1, 8);
    c.mask = i % 2 ? seqlm::MaskKind::kCausal : seqlm::MaskKind::kSemiCausal;
    const seqlm::TokenSequence seq{
        random_ids(c.observed + c.future, c.vocab, rng), c.observed, c.future};

    // p separate truncated passes, one per conditional.
    const auto params = seqlm::LMParams<double>::init(c, rng);
    long double total = 0;
    for (std::size_t t = c.observed; t < seq.size(); ++t) {
      const auto logits = seqlm::forward_logits(
          params, std::span(seq.tokens).first(t), c.observed);
      total += log_softmax_at(logits.data().subspan((t - 1) * c.vocab, c.vocab),
                              seq.tokens[t]);
    }
    worst_factor =
        std::max(worst_factor, std::abs(seqlm::sequence_log_prob(params, seq) -
                                        static_cast<double>(total)));

    // Cached decoding of the production float model against one
    // teacher-forced pass over the same tokens.
    const auto model = seqlm::LMParams<float>::init(c, rng);
    const auto forced = seqlm::forward_logits(model, seq.tokens, c.observed);
    seqlm::IncrementalDecoder<float> decoder(model);
    auto row = decoder.prefill(seq.prefix());
    for (std::size_t t = c.observed; t < seq.size(); ++t) {
      for (std::size_t k = 0; k < c.vocab; ++k) {
        worst_incremental = std::max(
            worst_incremental,
            std::abs(row[k] - double(forced[(t - 1) * c.vocab + k])));
      }
      if (t + 1 < seq.size()) row = decoder.step(seq.tokens[t]);
    }
  }
  note("sequences=" + std::to_string(kFactorizationSequences) +
       " max |log p - sum of conditionals|=" + fmt(worst_factor, 3) +
       " max |incremental - teacher forced|=" + fmt(worst_incremental, 3));
  return {worst_factor < kFactorizationTolerance &&
              worst_incremental < kIncrementalTolerance,
          "tolerances " + fmt(kFactorizationTolerance) + " and " +
              fmt(kIncrementalTolerance)};
}

// ---------------------------------------------------------------------------
// Shared corpus for the learning criteria: the CLI defaults.

struct Corpus {
  cli::RunConfig config;
  eval::PipelineConfig pipeline;
  data::SplitDatasets splits;
};

Corpus default_corpus() {
  Corpus c;
  c.pipeline = cli::pipeline_config(c.config);
  const auto all = data::synth_generate(nc::Rng(c.config.count("seed")),
                                        cli::synth_config(c.config));
  c.splits = data::split_dataset(all, cli::split_sizes(c.config));
  note("corpus: seed " + std::to_string(c.config.count("seed")) + ", " +
       std::to_string(all.size()) + " trajectories, split " +
       std::to_string(c.splits.train.size()) + "/" +
       std::to_string(c.splits.val.size()) + "/" +
       std::to_string(c.splits.test.size()));
  return c;
}

// ---------------------------------------------------------------------------
// 6. End-to-end learning.

Outcome end_to_end() {
  Stopwatch clock;
  const Corpus corpus = default_corpus();
  const auto& pc = corpus.pipeline;
  const auto vq = eval::train_vq_stage(corpus.splits.train, pc);
  const double vq_secs = clock.seconds();
  seqlm::LMParams<float> lm;
  const auto record = eval::train_lm_stage(vq, corpus.splits, pc, lm);
  const double lm_secs = clock.seconds() - vq_secs;
  const double rec = vqmem::reconstruction_ade(vq, corpus.splits.test);
  const auto report =
      eval::evaluate(vq, lm, corpus.splits.test, pc.sample, pc.threads);
  const auto baseline = eval::evaluate_baseline(corpus.splits.test);
  const double secs = clock.seconds();
  note("VQ epochs " + std::to_string(pc.vq_train.epochs) + " (" +
       fmt(vq_secs, 3) + " s), LM epochs " +
       std::to_string(pc.lm_train.epochs) + " (" + fmt(lm_secs, 3) +
       " s, " + std::to_string(record.iterations) + " iterations)");
  note("held-out reconstruction ADE " + fmt(rec) + " (bound " +
       fmt(kReconstructionBound) + ")");
  note("best-of-" + std::to_string(pc.sample.samples) + " ADE " +
       fmt(report.mean_ade) + " FDE " + fmt(report.mean_fde) +
       "; constant-velocity ADE " + fmt(baseline.mean_ade) + " FDE " +
       fmt(baseline.mean_fde));
  const bool budget = pc.vq_train.epochs <= kMaxVqEpochs &&
                      pc.lm_train.epochs <= kMaxLmEpochs;
  const bool rec_ok = rec < kReconstructionBound;
  const bool pred_ok = report.mean_ade < baseline.mean_ade;
  const bool fast = secs < kEndToEndSeconds;
  std::string detail = std::string("reconstruction ") +
                       (rec_ok ? "met" : "NOT met") + ", prediction " +
                       (pred_ok ? "beats" : "does NOT beat") +
                       " baseline, runtime " + fmt(secs, 4) + " s (limit " +
                       fmt(kEndToEndSeconds) + " s)";
  return {budget && rec_ok && pred_ok && fast, detail};
}

// ---------------------------------------------------------------------------
// 7. Memory size sweep.

Outcome theta_sweep() {
  Stopwatch clock;
  const Corpus corpus = default_corpus();
  const auto thetas = corpus.config.counts("sweep.thetas");
  const std::vector<std::size_t> expected{16, 32, 64, 128, 256};
  const auto rows = eval::sweep_theta(corpus.splits, thetas, corpus.pipeline);
  std::ostringstream table;
  eval::write_theta_csv(table, rows);
  std::string line;
  std::istringstream lines(table.str());
  while (std::getline(lines, line)) note(line);
  bool ok = thetas == expected && rows.size() == expected.size();
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    const auto& r = rows[i];
    ok = r.theta == expected[i] &&
         r.storage_bytes ==
             r.theta * corpus.pipeline.vq.entry_dim * kEntryBytes &&
         r.utilization > 0 && r.utilization <= 1 &&
         std::isfinite(r.reconstruction_ade) &&
         std::isfinite(r.prediction_ade) && std::isfinite(r.perplexity);
  }
  const double secs = clock.seconds();
  return {ok && secs < kSweepSeconds,
          std::to_string(rows.size()) + " rows, storage theta*" +
              std::to_string(corpus.pipeline.vq.entry_dim) + "*" +
              std::to_string(kEntryBytes) + " B, runtime " + fmt(secs, 4) +
              " s (limit " + fmt(kSweepSeconds) + " s)"};
}

// ---------------------------------------------------------------------------
// 8. Mask comparison.

Outcome mask_comparison() {
  const Corpus corpus = default_corpus();
  const auto vq = eval::train_vq_stage(corpus.splits.train, corpus.pipeline);
  const auto rows = eval::compare_masks(vq, corpus.splits, corpus.pipeline);
  std::ostringstream table;
  eval::write_mask_csv(table, rows);
  std::string line;
  std::istringstream lines(table.str());
  while (std::getline(lines, line)) note(line);
  const eval::MaskRow* s = nullptr;
  const eval::MaskRow* c = nullptr;
  for (const auto& r : rows) {
    if (r.mask == seqlm::MaskKind::kSemiCausal) s = &r;
    if (r.mask == seqlm::MaskKind::kCausal) c = &r;
  }
  if (s == nullptr || c == nullptr) return {false, "missing a mask variant"};
  const bool converged = s->converged_at.has_value() && c->converged_at.has_value();
  if (!converged) return {false, "a variant never reached its plateau"};
  const double ic_semi = double(*s->converged_at);
  const double ic_causal = double(*c->converged_at);
  const bool soft = ic_semi <= kSoftMaskRatio * ic_causal;
  note("iterations to convergence: semi-causal " + fmt(ic_semi, 8) +
       ", causal " + fmt(ic_causal, 8) + " (ratio " +
       fmt(ic_semi / ic_causal, 4) + ")");
  note(std::string("soft check IC_semi <= ") + fmt(kSoftMaskRatio) +
       " * IC_causal: " + (soft ? "holds" : "does not hold (reported only)"));
  return {true, "both variants converged; IC reported"};
}

// ---------------------------------------------------------------------------
// 9. Latency.

Outcome latency() {
  // Default toy sizes; timing does not depend on the weight values.
  const cli::RunConfig config;
  const auto pc = cli::pipeline_config(config);
  nc::Rng rng(909);
  const auto vq = vqmem::VQParams<float>::init(pc.vq, rng);
  const auto lm = seqlm::LMParams<float>::init(pc.lm, rng);
  data::SynthConfig sc = cli::synth_config(config);
  sc.count = 64;
  const auto inputs = data::synth_generate(nc::Rng(910), sc);
  eval::BenchConfig b{config.count("bench.trials"),
                      config.count("bench.warmup"),
                      config.count("bench.samples"), config.count("seed")};
  const auto report = eval::latency_bench(vq, lm, inputs, b);
  std::ostringstream text;
  eval::write_latency_text(text, report);
  std::string line;
  std::istringstream lines(text.str());
  while (std::getline(lines, line)) note(line);
  return {report.p50_ms < kLatencyP50Ms,
          "p50 " + fmt(report.p50_ms, 4) + " ms (limit " + fmt(kLatencyP50Ms) +
              " ms)"};
}

// ---------------------------------------------------------------------------
// 10. Determinism of the CLI pipeline.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome determinism(const std::string& cli_path, const fs::path& workdir) {
  if (cli_path.empty()) return {false, "no --cli binary given"};
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = workdir / ("determinism_run" + std::to_string(run));
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const char* cmd :
         {"synth", "train-vq", "encode", "train-lm", "predict", "eval"}) {
      const std::string line = "\"" + cli_path + "\" " + cmd +
                               " --set run.dir=\"" + dir.string() + "\" > \"" +
                               (dir / "log.txt").string() + "\" 2>&1";
      if (std::system(line.c_str()) != 0) {
        return {false, std::string("`trajmem ") + cmd + "` failed in run " +
                           std::to_string(run)};
      }
    }
    reports[run] = slurp(dir / "metrics.csv") + slurp(dir / "metrics.txt");
    note("run " + std::to_string(run) + ": metrics.csv + metrics.txt " +
         std::to_string(reports[run].size()) + " bytes");
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, same ? "metrics reports byte-identical"
                     : "metrics reports differ"};
}

}  // namespace
}  // namespace trajmem::acceptance

int main(int argc, char** argv) {
  using namespace trajmem::acceptance;
  CLI::App app{"trajmem acceptance checks"};
  std::vector<int> only;
  std::string cli_path;
  std::string workdir = fs::temp_directory_path() / "trajmem_acceptance";
  app.add_option("--only", only, "Criterion numbers to run (default: all)")
      ->check(CLI::Range(1, 10));
  app.add_option("--cli", cli_path, "Path of the trajmem binary");
  app.add_option("--workdir", workdir, "Scratch directory for CLI runs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient suite", gradient_suite},
      {"quantizer oracle", quantizer_oracle},
      {"stop-gradient contract", stop_gradient_contract},
      {"mask semantics", mask_semantics},
      {"likelihood factorization", likelihood_factorization},
      {"end-to-end learning", end_to_end},
      {"memory size sweep", theta_sweep},
      {"mask comparison", mask_comparison},
      {"latency", latency},
      {"determinism", [&] { return determinism(cli_path, workdir); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "criterion " << id << " (" << criteria[i].first
              << "): " << (out.pass ? "PASS" : "FAIL") << " - " << out.detail
              << std::endl;
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
