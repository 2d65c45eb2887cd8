// Copyright 2026 The EA-Interp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "eainterp/nn/adam.hpp"
#include "eainterp/nn/layers.hpp"
#include "eainterp/nn/ops.hpp"
#include "gradcheck.hpp"

namespace eainterp::nn {
namespace {

Tensor random_tensor(Shape s, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  Tensor t(s);
  for (float& v : t.values()) v = u(rng);
  return t;
}

using Builder = std::function<Var(const std::vector<Var>&)>;

// Reduces op outputs to a scalar with fixed random weights so every output
// element contributes a distinct gradient.
Var weighted_sum(const Var& y, std::uint64_t seed) {
  return mean(mul(y, constant(random_tensor(y->value.shape(), seed))));
}

// Moves values off the listed kinks so finite differences stay on one side.
Tensor away_from(Tensor t, std::initializer_list<float> kinks, float margin = 0.02f) {
  for (float& v : t.values())
    for (float k : kinks)
      if (std::fabs(v - k) < margin) v = k + (v < k ? -margin : margin);
  return t;
}

double eval_scalar(const Builder& f, const std::vector<Tensor>& inputs) {
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(constant(t));
  return f(vars)->value.data()[0];
}

// Float32 autograd against central differences; step and tolerance are
// sized for single precision.
void expect_gradients_match(const Builder& f, std::vector<Tensor> inputs, float step = 1e-2f,
                            double tol = 2e-2) {
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(parameter(t));
  Var y = f(vars);
  ASSERT_EQ(y->value.size(), 1u);
  backward(y);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const float orig = inputs[k].data()[i];
      inputs[k].data()[i] = orig + step;
      const double up = eval_scalar(f, inputs);
      inputs[k].data()[i] = orig - step;
      const double down = eval_scalar(f, inputs);
      inputs[k].data()[i] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = vars[k]->has_grad() ? vars[k]->grad.data()[i] : 0.0;
      EXPECT_NEAR(analytic, numeric, tol * std::max({std::fabs(analytic), std::fabs(numeric), 1e-2}))
          << "input " << k << " element " << i;
    }
  }
}

TEST(AutogradTest, ConstantsRecordNothing) {
  Var a = constant(Tensor(Shape{1, 1, 2, 2}, 1.0f));
  Var b = add(a, a);
  EXPECT_FALSE(b->requires_grad);
  EXPECT_TRUE(b->inputs.empty());
}

TEST(AutogradTest, GradientsAccumulateAcrossUses) {
  Var a = parameter(Tensor(Shape{1, 1, 1, 1}, 3.0f));
  Var y = add(mul(a, a), a);
  backward(y);
  EXPECT_FLOAT_EQ(a->grad.data()[0], 7.0f);
}

TEST(OpsGradientTest, ElementwiseOps) {
  const Shape s{2, 3, 4, 5};
  std::vector<Tensor> in{away_from(random_tensor(s, 1), {-0.5f, 0.0f, 0.5f}), random_tensor(s, 2)};
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(add(v[0], v[1]), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(sub(v[0], v[1]), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(mul(v[0], v[1]), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(scale(v[0], -2.5f), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(add_scalar(v[0], 0.3f), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(sigmoid(v[0]), 9); }, in);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(leaky_relu(v[0], 0.1f), 9); },
                         in, 1e-3f);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(clamp(v[0], -0.5f, 0.5f), 9); },
                         in, 1e-3f);
  std::vector<Tensor> apart{in[0], in[0]};
  for (std::size_t i = 0; i < apart[1].size(); ++i) apart[1].data()[i] += (i % 2 ? 0.1f : -0.1f);
  expect_gradients_match([](const std::vector<Var>& v) { return l1_mean(v[0], v[1]); }, apart, 1e-3f);
  std::vector<Tensor> positive{random_tensor(s, 3, 0.5f, 2.0f)};
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(log(v[0]), 9); }, positive, 1e-3f);
}

TEST(OpsGradientTest, BroadcastAndReductions) {
  std::vector<Tensor> in{random_tensor({2, 3, 4, 4}, 4), random_tensor({2, 1, 4, 4}, 5)};
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(mul_broadcast(v[0], v[1]), 8); }, in);
  const std::vector<float> factors{0.25f, -1.5f};
  expect_gradients_match(
      [&](const std::vector<Var>& v) { return weighted_sum(scale_per_sample(v[0], factors), 8); }, in);
  expect_gradients_match(
      [](const std::vector<Var>& v) { return weighted_sum(mean_per_sample(v[0]), 8); }, in);
}

TEST(OpsGradientTest, ChannelPlumbing) {
  std::vector<Tensor> in{random_tensor({2, 2, 3, 3}, 6), random_tensor({2, 3, 3, 3}, 7)};
  expect_gradients_match(
      [](const std::vector<Var>& v) {
        const Var parts[] = {v[0], v[1]};
        return weighted_sum(concat_channels(parts), 11);
      },
      in);
  expect_gradients_match(
      [](const std::vector<Var>& v) { return weighted_sum(slice_channels(v[1], 1, 2), 11); }, in);
}

TEST(OpsGradientTest, PoolingAndUpsampling) {
  std::vector<Tensor> in{random_tensor({2, 2, 6, 8}, 12)};
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(max_pool2(v[0]), 3); }, in, 1e-3f);
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(upsample_nearest2(v[0]), 3); }, in);
}

TEST(OpsGradientTest, Convolution) {
  for (auto [k, stride, pad] : {std::tuple{3, 1, 1}, std::tuple{4, 2, 1}, std::tuple{1, 1, 0}, std::tuple{5, 1, 2}}) {
    std::vector<Tensor> in{random_tensor({2, 3, 7, 6}, 20), random_tensor({4, 3, k, k}, 21),
                           random_tensor({1, 4, 1, 1}, 22)};
    expect_gradients_match(
        [&](const std::vector<Var>& v) { return weighted_sum(conv2d(v[0], v[1], v[2], stride, pad), 5); }, in);
  }
}

TEST(OpsGradientTest, BatchNormTraining) {
  std::vector<Tensor> in{random_tensor({3, 2, 3, 3}, 30), random_tensor({1, 2, 1, 1}, 31, 0.5f, 1.5f),
                         random_tensor({1, 2, 1, 1}, 32)};
  expect_gradients_match(
      [](const std::vector<Var>& v) {
        BatchNormState state;
        return weighted_sum(batch_norm(v[0], v[1], v[2], state, true), 7);
      },
      in, 1e-3f, 3e-2);
}

TEST(OpsGradientTest, WarpAndSoftEdgesFloat) {
  std::vector<Tensor> in{random_tensor({1, 3, 6, 6}, 40, 0.0f, 1.0f), random_tensor({1, 2, 6, 6}, 41, -1.3f, 1.3f)};
  // Small step so perturbations rarely cross a bilinear cell boundary.
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(warp(v[0], v[1]), 2); }, in, 1e-3f,
                         5e-2);
  std::vector<Tensor> rgb{random_tensor({2, 3, 6, 6}, 42, 0.0f, 1.0f)};
  expect_gradients_match([](const std::vector<Var>& v) { return weighted_sum(soft_edges(v[0]), 2); }, rgb, 1e-3f,
                         5e-2);
}

TEST(KernelGradientTest, WarpDoublePrecision) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = testing::check_warp_gradients(seed);
    EXPECT_LE(r.max_rel_error, 1e-3) << "seed " << seed;
    EXPECT_GT(r.checked, 300);
  }
}

TEST(KernelGradientTest, SoftEdgesDoublePrecision) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    EXPECT_LE(testing::check_soft_edge_gradients(seed, true).max_rel_error, 1e-3) << "seed " << seed;
    EXPECT_LE(testing::check_soft_edge_gradients(seed, false).max_rel_error, 1e-3) << "seed " << seed;
  }
}

// Direct seven-loop convolution.
Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  const Shape xs = x.shape(), ws = w.shape();
  const int ho = (xs.h + 2 * pad - ws.h) / stride + 1;
  const int wo = (xs.w + 2 * pad - ws.w) / stride + 1;
  Tensor y(Shape{xs.n, ws.n, ho, wo});
  for (int n = 0; n < xs.n; ++n)
    for (int o = 0; o < ws.n; ++o)
      for (int oy = 0; oy < ho; ++oy)
        for (int ox = 0; ox < wo; ++ox) {
          double acc = b.empty() ? 0.0 : b.data()[o];
          for (int c = 0; c < xs.c; ++c)
            for (int ky = 0; ky < ws.h; ++ky)
              for (int kx = 0; kx < ws.w; ++kx) {
                const int iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
                if (iy < 0 || ix < 0 || iy >= xs.h || ix >= xs.w) continue;
                acc += static_cast<double>(x.at(n, c, iy, ix)) * w.at(o, c, ky, kx);
              }
          y.at(n, o, oy, ox) = static_cast<float>(acc);
        }
  return y;
}

TEST(ConvTest, MatchesDirectConvolution) {
  for (auto [k, stride, pad] : {std::tuple{7, 1, 3}, std::tuple{5, 1, 2}, std::tuple{3, 1, 1}, std::tuple{4, 2, 1},
                                std::tuple{1, 1, 0}, std::tuple{3, 2, 0}}) {
    Tensor x = random_tensor({2, 5, 13, 11}, 50), w = random_tensor({6, 5, k, k}, 51), b = random_tensor({1, 6, 1, 1}, 52);
    Var y = conv2d(constant(x), constant(w), constant(b), stride, pad);
    Tensor ref = naive_conv(x, w, b, stride, pad);
    ASSERT_EQ(y->value.shape(), ref.shape());
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(y->value.data()[i], ref.data()[i], 1e-4) << i;
  }
}

TEST(ConvTest, RejectsMismatchedChannels) {
  Var x = constant(Tensor(Shape{1, 3, 8, 8}));
  Var w = constant(Tensor(Shape{4, 2, 3, 3}));
  EXPECT_THROW(conv2d(x, w, nullptr, 1, 1), std::invalid_argument);
}

TEST(ConvTest, HeInitBoundAndZeroInit) {
  std::mt19937_64 rng(3);
  Conv2d conv(8, 4, 3, 1, 1, 0.1f, rng);
  ParameterSet ps;
  conv.collect("c", ps);
  ASSERT_EQ(ps.params.size(), 2u);
  const double bound = std::sqrt(2.0 / (1.0 + 0.01)) * std::sqrt(3.0 / (8 * 9));
  double maxabs = 0.0;
  for (float v : ps.params[0].var->value.values()) maxabs = std::max(maxabs, static_cast<double>(std::fabs(v)));
  EXPECT_LE(maxabs, bound + 1e-6);
  EXPECT_GT(maxabs, 0.5 * bound);
  conv.zero_init();
  for (const auto& p : ps.params)
    for (float v : p.var->value.values()) EXPECT_EQ(v, 0.0f);
}

TEST(BatchNormTest, TrainingNormalizesAndUpdatesRunningStats) {
  Tensor x = random_tensor({4, 2, 5, 5}, 60, 1.0f, 3.0f);
  BatchNormState state;
  Var gamma = constant(Tensor(Shape{1, 2, 1, 1}, 1.0f));
  Var beta = constant(Tensor(Shape{1, 2, 1, 1}, 0.0f));
  Var y = batch_norm(constant(x), gamma, beta, state, true);
  const std::size_t count = 4 * 25;
  for (int c = 0; c < 2; ++c) {
    double m = 0, v = 0, xm = 0, xv = 0;
    for (int n = 0; n < 4; ++n)
      for (int i = 0; i < 25; ++i) {
        m += y->value.plane(n, c)[i];
        xm += x.plane(n, c)[i];
      }
    m /= count;
    xm /= count;
    for (int n = 0; n < 4; ++n)
      for (int i = 0; i < 25; ++i) {
        v += std::pow(y->value.plane(n, c)[i] - m, 2);
        xv += std::pow(x.plane(n, c)[i] - xm, 2);
      }
    EXPECT_NEAR(m, 0.0, 1e-5);
    EXPECT_NEAR(v / count, 1.0, 1e-3);
    EXPECT_NEAR(state.running_mean.data()[c], 0.1 * xm, 1e-5);
    EXPECT_NEAR(state.running_var.data()[c], 0.9 + 0.1 * xv / (count - 1), 1e-5);
  }
  // Inference uses the running estimates and leaves them alone.
  const Tensor rm = state.running_mean, rv = state.running_var;
  Var z = batch_norm(constant(x), gamma, beta, state, false);
  const float expect = (x.data()[0] - rm.data()[0]) / std::sqrt(rv.data()[0] + 1e-5f);
  EXPECT_NEAR(z->value.data()[0], expect, 1e-5);
  EXPECT_EQ(state.running_mean.data()[0], rm.data()[0]);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Var p = parameter(Tensor(Shape{1, 1, 1, 3}, std::vector<float>{1.0f, -2.0f, 0.5f}));
  ParameterSet ps;
  ps.params.push_back({"p", p});
  Adam opt(ps, AdamConfig{.lr = 0.01f});
  p->grad_buffer().data()[0] = 3.0f;
  p->grad.data()[1] = -0.2f;
  p->grad.data()[2] = 0.0f;
  opt.step();
  // With bias correction the first update is lr * sign(g).
  EXPECT_NEAR(p->value.data()[0], 0.99f, 1e-6);
  EXPECT_NEAR(p->value.data()[1], -1.99f, 1e-6);
  EXPECT_EQ(p->value.data()[2], 0.5f);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(AdamTest, StateRoundTripsThroughStream) {
  auto make = [] {
    Var p = parameter(Tensor(Shape{1, 1, 2, 2}, 1.0f));
    ParameterSet ps;
    ps.params.push_back({"p", p});
    return std::pair{p, ps};
  };
  auto [p1, ps1] = make();
  auto [p2, ps2] = make();
  Adam a(ps1, {}), b(ps2, {});
  for (int i = 0; i < 3; ++i) {
    p1->grad_buffer().fill(0.3f * (i + 1));
    a.step();
  }
  std::stringstream ss;
  a.save(ss);
  b.load(ss);
  p2->value = p1->value;
  p1->grad.fill(-0.7f);
  p2->grad_buffer().fill(-0.7f);
  a.step();
  b.step();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p1->value.data()[i], p2->value.data()[i]);
}

}  // namespace
}  // namespace eainterp::nn
