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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "test_util.hpp"
#include "trajmem/numcore/adam.hpp"
#include "trajmem/numcore/grad_check.hpp"
#include "trajmem/numcore/ops.hpp"
#include "trajmem/numcore/rng.hpp"
#include "trajmem/numcore/tape.hpp"

namespace trajmem::nc {
namespace {

using testing::probe_weights;
using testing::random_ids;
using testing::random_tensor;

using TensorD = Tensor<double>;

// sum(w * f) for a fixed random w.
TensorD weighted(const TensorD& y, const TensorD& w) { return sum(mul(y, w)); }

TEST(TensorTest, ShapeInvariants) {
  auto t = TensorD::zeros({2, 3}, true);
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_EQ(t.grad().size(), 6u);
  EXPECT_THROW(TensorD::from({2, 2}, {1, 2, 3}), ContractError);
  EXPECT_THROW(TensorD::zeros({0, 3}), ContractError);
  t.set_requires_grad(false);
  EXPECT_FALSE(t.has_grad());
}

TEST(MatmulTest, IdentityAndProjector) {
  auto eye = TensorD::from({2, 2}, {1, 0, 0, 1});
  auto m = TensorD::from({2, 2}, {1, 2, 3, 4});
  auto r = matmul(eye, m);
  EXPECT_EQ(std::vector<double>(r.data().begin(), r.data().end()),
            (std::vector<double>{1, 2, 3, 4}));

  auto proj = TensorD::from({2, 2}, {1, 0, 0, 0});
  auto rhs = TensorD::from({2, 2}, {5, 6, 7, 8});
  auto p = matmul(proj, rhs);
  EXPECT_EQ(std::vector<double>(p.data().begin(), p.data().end()),
            (std::vector<double>{5, 6, 0, 0}));
}

TEST(MatmulTest, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(TensorD::zeros({2, 3}), TensorD::zeros({2, 3})),
               ContractError);
}

TEST(MatmulTest, GradientOfSumMatchesFiniteDifferences) {
  Rng rng(11);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 2}, rng);
  auto report = grad_check<double>([&] { return sum(matmul(a, b)); }, {a, b});
  EXPECT_TRUE(report.passed) << report.worst;
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(ElementwiseTest, ReluAndIdentity) {
  auto r = relu(TensorD::from({3}, {-1, 0, 2}));
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.0);
  EXPECT_EQ(r[2], 2.0);

  Rng rng(3);
  auto x = random_tensor({2, 3}, rng, -1, 1, false);
  auto y = add(x, TensorD::scalar(0.0));
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(x[i], y[i]);
}

TEST(ElementwiseTest, IncompatibleShapesThrow) {
  EXPECT_THROW(add(TensorD::zeros({2, 3}), TensorD::zeros({3, 2})),
               ContractError);
}

TEST(ElementwiseTest, MulGradientCheck) {
  Rng rng(5);
  auto a = random_tensor({2, 3}, rng);
  auto b = random_tensor({2, 3}, rng);
  auto w = probe_weights<double>({2, 3}, rng);
  auto report =
      grad_check<double>([&] { return weighted(mul(a, b), w); }, {a, b});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(ElementwiseTest, ScalarBroadcastGradient) {
  Rng rng(6);
  auto a = random_tensor({2, 3}, rng);
  auto s = random_tensor({1}, rng);
  auto w = probe_weights<double>({2, 3}, rng);
  auto report = grad_check<double>(
      [&] { return add(weighted(sub(mul(a, s), s), w), scale(s, 3.0)); },
      {a, s});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(MaskedSoftmaxTest, SymmetricAllowed) {
  auto y = masked_softmax(TensorD::from({2}, {0, 0}),
                          AttentionMask::all_allowed(1, 2));
  EXPECT_DOUBLE_EQ(y[0], 0.5);
  EXPECT_DOUBLE_EQ(y[1], 0.5);
}

TEST(MaskedSoftmaxTest, BlockedEntryGetsExactlyZero) {
  AttentionMask mask(1, 2, true);
  mask.set(0, 1, false);
  auto y = masked_softmax(TensorD::from({2}, {5, 100}), mask);
  EXPECT_EQ(y[0], 1.0);
  EXPECT_EQ(y[1], 0.0);
}

TEST(MaskedSoftmaxTest, MatchesDirectFormulaOnAllowedSubset) {
  AttentionMask mask(1, 3, true);
  mask.set(0, 2, false);
  auto y = masked_softmax(TensorD::from({3}, {1, 2, 3}), mask);
  const double z = std::exp(1.0) + std::exp(2.0);
  EXPECT_NEAR(y[0], std::exp(1.0) / z, 1e-15);
  EXPECT_NEAR(y[1], std::exp(2.0) / z, 1e-15);
  EXPECT_EQ(y[2], 0.0);
}

TEST(MaskedSoftmaxTest, FullyBlockedRowThrows) {
  AttentionMask mask(2, 2, true);
  mask.set(1, 0, false);
  mask.set(1, 1, false);
  EXPECT_THROW(masked_softmax(TensorD::zeros({2, 2}), mask), ContractError);
}

TEST(MaskedSoftmaxTest, RowsSumToOneAndGradientChecks) {
  Rng rng(8);
  AttentionMask mask(3, 3, true);
  mask.set(0, 2, false);
  mask.set(1, 2, false);
  auto x = random_tensor({2, 3, 3}, rng, -3, 3);
  auto y = masked_softmax(x, mask);
  for (std::size_t r = 0; r < 6; ++r) {
    double total = 0;
    for (std::size_t j = 0; j < 3; ++j) total += y[r * 3 + j];
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_EQ(y[2], 0.0);
  EXPECT_EQ(y[5], 0.0);
  auto w = probe_weights<double>({2, 3, 3}, rng);
  auto report =
      grad_check<double>([&] { return weighted(masked_softmax(x, mask), w); },
                         {x});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(LayerNormTest, ConstantRowMapsToZero) {
  auto gain = TensorD::full({4}, 1.0);
  auto bias = TensorD::zeros({4});
  auto y = layernorm(TensorD::full({4}, 1.0), gain, bias);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(LayerNormTest, SymmetricPair) {
  const double a = 3.0;
  auto y = layernorm(TensorD::from({2}, {-a, a}), TensorD::full({2}, 1.0),
                     TensorD::zeros({2}));
  const double expected = a / std::sqrt(a * a + 1e-5);
  EXPECT_NEAR(y[0], -expected, 1e-15);
  EXPECT_NEAR(y[1], expected, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-6);
}

TEST(LayerNormTest, SingleFeatureRejected) {
  EXPECT_THROW(layernorm(TensorD::zeros({3, 1}), TensorD::full({1}, 1.0),
                         TensorD::zeros({1})),
               ContractError);
}

TEST(LayerNormTest, GradientCheck) {
  Rng rng(9);
  auto x = random_tensor({2, 8}, rng, -2, 2);
  auto gain = random_tensor({8}, rng, 0.5, 1.5);
  auto bias = random_tensor({8}, rng);
  auto w = probe_weights<double>({2, 8}, rng);
  auto report = grad_check<double>(
      [&] { return weighted(layernorm(x, gain, bias), w); }, {x, gain, bias});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(EmbeddingTest, GathersRows) {
  auto table = TensorD::from({3, 2}, {1, 2, 3, 4, 5, 6});
  std::vector<std::int32_t> ids{0};
  auto y = embedding_lookup(table, ids);
  EXPECT_EQ(y[0], 1.0);
  EXPECT_EQ(y[1], 2.0);
}

TEST(EmbeddingTest, RepeatedIdDoublesGradient) {
  auto table = TensorD::zeros({3, 2}, true);
  std::vector<std::int32_t> ids{2, 2};
  auto loss = sum(embedding_lookup(table, ids));
  backward(loss);
  EXPECT_EQ(table.grad()[4], 2.0);
  EXPECT_EQ(table.grad()[5], 2.0);
  EXPECT_EQ(table.grad()[0], 0.0);
}

TEST(EmbeddingTest, OutOfRangeThrows) {
  auto table = TensorD::zeros({3, 2});
  std::vector<std::int32_t> ids{3};
  EXPECT_THROW(embedding_lookup(table, ids), ContractError);
}

TEST(EmbeddingTest, GradientCheck) {
  Rng rng(10);
  auto table = random_tensor({5, 3}, rng);
  auto ids = random_ids(7, 5, rng);
  auto w = probe_weights<double>({7, 3}, rng);
  auto report = grad_check<double>(
      [&] { return weighted(embedding_lookup(table, ids), w); }, {table});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(CrossEntropyTest, LargeMarginDrivesLossToZero) {
  std::vector<std::int32_t> targets{1};
  std::vector<double> weights{1.0};
  double previous = 1e9;
  for (double margin : {1.0, 5.0, 20.0, 50.0}) {
    auto loss = cross_entropy(TensorD::from({1, 3}, {0, margin, 0}), targets,
                              weights)
                    .item();
    EXPECT_LT(loss, previous);
    previous = loss;
  }
  EXPECT_LT(previous, 1e-20);
}

TEST(CrossEntropyTest, UniformLogitsGiveLogK) {
  std::vector<std::int32_t> targets{0, 3};
  std::vector<double> weights{1.0, 1.0};
  auto loss = cross_entropy(TensorD::zeros({2, 4}), targets, weights).item();
  EXPECT_NEAR(loss, std::log(4.0), 1e-15);
  EXPECT_NEAR(loss, 1.3863, 1e-4);
}

TEST(CrossEntropyTest, MatchesDirectLogSumExp) {
  Rng rng(12);
  auto logits = random_tensor({3, 5}, rng, -4, 4, false);
  std::vector<std::int32_t> targets{4, 0, 2};
  std::vector<double> weights{0.5, 2.0, 1.0};
  double expected = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < 5; ++j) z += std::exp(logits[i * 5 + j]);
    expected += weights[i] * (std::log(z) - logits[i * 5 + targets[i]]);
  }
  expected /= 3.5;
  EXPECT_NEAR(cross_entropy(logits, targets, weights).item(), expected, 1e-10);
}

TEST(CrossEntropyTest, ContractErrors) {
  std::vector<double> weights{1.0};
  std::vector<std::int32_t> bad{5};
  EXPECT_THROW(cross_entropy(TensorD::zeros({1, 5}), bad, weights),
               ContractError);
  std::vector<std::int32_t> ok{1};
  std::vector<double> zero{0.0};
  EXPECT_THROW(cross_entropy(TensorD::zeros({1, 5}), ok, zero), ContractError);
}

TEST(CrossEntropyTest, GradientCheck) {
  Rng rng(13);
  auto logits = random_tensor({4, 6}, rng, -2, 2);
  auto targets = random_ids(4, 6, rng);
  std::vector<double> weights{1.0, 0.0, 0.5, 2.0};
  auto report = grad_check<double>(
      [&] { return cross_entropy(logits, targets, weights); }, {logits});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(LayoutTest, ConcatSliceSwapGradients) {
  Rng rng(14);
  auto a = random_tensor({2, 3, 2}, rng);
  auto b = random_tensor({2, 1, 2}, rng);
  auto w = probe_weights<double>({2, 2, 2}, rng);
  auto report = grad_check<double>(
      [&] {
        auto joined = concat<double>({a, b}, 1);
        return weighted(slice(joined, 1, 2, 2), w);
      },
      {a, b});
  EXPECT_TRUE(report.passed) << report.worst;

  auto x = random_tensor({2, 3, 2, 2}, rng);
  auto w4 = probe_weights<double>({2, 2, 3, 2}, rng);
  auto swap_report =
      grad_check<double>([&] { return weighted(swap_axes12(x), w4); }, {x});
  EXPECT_TRUE(swap_report.passed) << swap_report.worst;
}

TEST(LayoutTest, ConcatPlacesBlocksPerOuterIndex) {
  auto a = TensorD::from({2, 1, 1}, {1, 2});
  auto b = TensorD::from({2, 2, 1}, {10, 11, 20, 21});
  auto c = concat<double>({a, b}, 1);
  EXPECT_EQ(std::vector<double>(c.data().begin(), c.data().end()),
            (std::vector<double>{1, 10, 11, 2, 20, 21}));
}

TEST(BmmTest, GradientCheckBothLayouts) {
  Rng rng(15);
  auto a = random_tensor({2, 3, 4}, rng);
  auto b = random_tensor({2, 4, 2}, rng);
  auto bt = random_tensor({2, 2, 4}, rng);
  auto w = probe_weights<double>({2, 3, 2}, rng);
  auto r1 = grad_check<double>([&] { return weighted(bmm(a, b), w); }, {a, b});
  EXPECT_TRUE(r1.passed) << r1.worst;
  auto r2 = grad_check<double>(
      [&] { return weighted(bmm(a, bt, true), w); }, {a, bt});
  EXPECT_TRUE(r2.passed) << r2.worst;
}

TEST(BackwardTest, SumGivesOnes) {
  auto x = TensorD::from({2, 2}, {1, 2, 3, 4}, true);
  auto loss = sum(x);
  backward(loss);
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(BackwardTest, SquareGivesTwiceInput) {
  auto x = TensorD::from({2}, {1, 2}, true);
  auto loss = sum(mul(x, x));
  backward(loss);
  EXPECT_EQ(x.grad()[0], 2.0);
  EXPECT_EQ(x.grad()[1], 4.0);
}

TEST(BackwardTest, NonScalarLossThrows) {
  auto x = TensorD::from({2}, {1, 2}, true);
  auto y = mul(x, x);
  EXPECT_THROW(backward(y), ContractError);
  Tape<double>::current().clear();
}

TEST(BackwardTest, ReplaysEachRecordedOpOnceAndClears) {
  auto x = TensorD::from({2}, {1, 2}, true);
  auto& tape = Tape<double>::current();
  tape.clear();
  auto loss = sum(relu(scale(x, 2.0)));
  EXPECT_EQ(tape.size(), 3u);
  EXPECT_EQ(backward(loss), 3u);
  EXPECT_EQ(tape.size(), 0u);
}

TEST(BackwardTest, NoGradGuardSkipsRecording) {
  auto x = TensorD::from({2}, {1, 2}, true);
  auto& tape = Tape<double>::current();
  tape.clear();
  {
    NoGradGuard guard;
    auto y = sum(x);
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_EQ(tape.size(), 0u);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  auto p = TensorD::from({3}, {1, -2, 3}, true);
  Adam<double> opt({p}, {});
  opt.step();
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], -2.0);
  EXPECT_EQ(p[2], 3.0);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  auto p = TensorD::from({1}, {0.5}, true);
  Adam<double> opt({p}, {.learning_rate = 0.1});
  p.grad()[0] = 1.0;
  opt.step();
  // m_hat = 1, v_hat = 1 after bias correction.
  EXPECT_NEAR(p[0], 0.5 - 0.1 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(p.grad()[0], 0.0);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(AdamTest, MissingGradientThrows) {
  auto p = TensorD::from({1}, {0.5}, false);
  Adam<double> opt({p}, {});
  EXPECT_THROW(opt.step(), ContractError);
}

TEST(AdamTest, DeterministicAcrossRuns) {
  auto run = [] {
    Rng rng(99);
    auto w = random_tensor<float>({4, 3}, rng);
    auto x = random_tensor<float>({5, 4}, rng, -1, 1, false);
    Adam<float> opt({w}, {.learning_rate = 0.05});
    for (int i = 0; i < 10; ++i) {
      auto loss = mean(mul(matmul(x, w), matmul(x, w)));
      backward(loss);
      opt.step();
    }
    return std::vector<float>(w.data().begin(), w.data().end());
  };
  const auto first = run();
  const auto second = run();
  ASSERT_EQ(first.size(), second.size());
  EXPECT_EQ(0, std::memcmp(first.data(), second.data(),
                           first.size() * sizeof(float)));
}

TEST(GradCheckTest, SquareAtThree) {
  auto x = TensorD::from({1}, {3.0}, true);
  auto report = grad_check<double>([&] { return mul(x, x); }, {x});
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_abs_error, 1e-8);
}

TEST(GradCheckTest, SoftmaxOfMatmulComposite) {
  Rng rng(16);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 3}, rng);
  AttentionMask mask(3, 3, true);
  mask.set(0, 1, false);
  auto w = probe_weights<double>({3, 3}, rng);
  auto report = grad_check<double>(
      [&] { return weighted(masked_softmax(matmul(a, b), mask), w); }, {a, b});
  EXPECT_TRUE(report.passed) << report.worst;
}

TEST(GradCheckTest, ReportsWrongGradient) {
  // straight_through deliberately lies about its derivative.
  auto x = TensorD::from({2}, {1.0, 2.0}, true);
  auto q = TensorD::from({2}, {0.0, 0.0});
  auto report = grad_check<double>(
      [&] { return sum(mul(straight_through(x, q), x)); }, {x});
  EXPECT_FALSE(report.passed);
}

TEST(StraightThroughTest, ForwardIsQuantizedBackwardIsIdentity) {
  auto a = TensorD::from({2}, {0.3, -0.7}, true);
  auto q = TensorD::from({2}, {0.0, -1.0}, true);
  auto y = straight_through(a, q);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[1], -1.0);
  auto loss = sum(scale(y, 3.0));
  backward(loss);
  EXPECT_EQ(a.grad()[0], 3.0);
  EXPECT_EQ(a.grad()[1], 3.0);
  EXPECT_EQ(q.grad()[0], 0.0);
}

TEST(RngTest, FirstDrawMatchesSplitMix64Reference) {
  Rng rng(0);
  EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
}

TEST(RngTest, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, RangesAndMoments) {
  Rng rng(7);
  double total = 0, total_sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
    const double z = rng.normal();
    total += z;
    total_sq += z * z;
  }
  EXPECT_NEAR(total / n, 0.0, 0.05);
  EXPECT_NEAR(total_sq / n, 1.0, 0.05);
}

TEST(RngTest, ForkDoesNotAdvanceParent) {
  Rng parent(5);
  Rng child = parent.fork(1);
  EXPECT_EQ(parent.counter(), 0u);
  EXPECT_NE(child.next_u64(), Rng(5).next_u64());
  EXPECT_EQ(parent.fork(1).next_u64(), Rng(5).fork(1).next_u64());
}

}  // namespace
}  // namespace trajmem::nc
