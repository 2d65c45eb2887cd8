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

#include "eainterp/models.hpp"
#include "eainterp/tensor_bridge.hpp"
#include "test_util.hpp"

namespace eainterp {
namespace {

const std::vector<int> kSmall{4, 4, 8, 8, 8, 8};

FlowUNetConfig small_config(EdgeMode mode) {
  FlowUNetConfig c;
  c.input_mode = mode;
  c.encoder_channels = kSmall;
  return c;
}

std::size_t param_count(FlowEstimator& e) {
  nn::ParameterSet ps;
  e.collect("f", ps);
  return ps.count();
}

bool all_finite(std::span<const float> v) {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

TEST(FlowUNetConfigTest, ChannelCountsPerMode) {
  EXPECT_EQ(small_config(EdgeMode::kPlain).input_channels(), 6);
  EXPECT_EQ(small_config(EdgeMode::kAugment).input_channels(), 6);
  EXPECT_EQ(small_config(EdgeMode::kConcat).input_channels(), 12);
  EXPECT_EQ(small_config(EdgeMode::kTwoStream).input_channels(), 6);
  EXPECT_EQ(small_config(EdgeMode::kTwoStream).edge_stream_channels(), 2);
  EXPECT_EQ(small_config(EdgeMode::kConcat).edge_stream_channels(), 0);
}

TEST(FlowUNetConfigTest, ModeNamesRoundTrip) {
  for (EdgeMode m : {EdgeMode::kPlain, EdgeMode::kAugment, EdgeMode::kConcat, EdgeMode::kTwoStream})
    EXPECT_EQ(parse_edge_mode(to_string(m)), m);
  EXPECT_THROW(parse_edge_mode("sideways"), std::invalid_argument);
}

TEST(FlowUNetConfigTest, RejectsBadWidths) {
  FlowUNetConfig c;
  c.encoder_channels = {32, 64, 128, 256, 512};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(FlowEstimator(c, 1), std::invalid_argument);
  c.encoder_channels = {32, 64, 0, 256, 512, 512};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

// Independent count: each conv has cin * cout * k * k weights and cout biases.
TEST(FlowEstimatorTest, ParameterCountRegression) {
  FlowUNetConfig c;
  c.input_mode = EdgeMode::kPlain;
  FlowEstimator plain(c, 1);
  EXPECT_EQ(param_count(plain), 19794116u);
  c.input_mode = EdgeMode::kAugment;
  FlowEstimator augment(c, 1);
  EXPECT_EQ(param_count(augment), 19794116u);
  c.input_mode = EdgeMode::kConcat;
  FlowEstimator concat(c, 1);
  EXPECT_EQ(param_count(concat), 19803524u);
  c.input_mode = EdgeMode::kTwoStream;
  FlowEstimator two(c, 1);
  EXPECT_EQ(param_count(two), 39581960u);

  Refiner ref(RefinerConfig{}, 1);
  nn::ParameterSet ps;
  ref.collect("r", ps);
  EXPECT_EQ(ps.count(), 19816357u);

  Discriminator df(DiscriminatorKind::kFrame, {}, 1), de(DiscriminatorKind::kEdge, {}, 1);
  nn::ParameterSet pf, pe;
  df.collect("d", pf);
  de.collect("d", pe);
  EXPECT_EQ(pf.count(), 2758977u);
  EXPECT_EQ(pe.count(), 2756929u);
}

TEST(FlowEstimatorTest, OutputShapeAndFiniteness) {
  for (EdgeMode m : {EdgeMode::kPlain, EdgeMode::kAugment, EdgeMode::kConcat, EdgeMode::kTwoStream}) {
    FlowEstimator est(small_config(m), 7);
    const Frame i0 = testing::random_frame(64, 96, 1), i1 = testing::random_frame(64, 96, 2);
    const EdgeMap e0 = testing::random_grid<1>(64, 96, 3), e1 = testing::random_grid<1>(64, 96, 4);
    const auto [f01, f10] = estimate_flow(est, i0, i1, e0, e1);
    EXPECT_EQ(f01.height(), 64);
    EXPECT_EQ(f01.width(), 96);
    EXPECT_EQ(f10.height(), 64);
    EXPECT_TRUE(all_finite(f01.values()) && all_finite(f10.values())) << to_string(m);
    const FlowInputs in[] = {{i0, i1, e0, e1}};
    const auto out = est.forward(prepare_flow_input(m, in));
    EXPECT_EQ(out->value.shape(), (nn::Shape{1, 4, 64, 96}));
  }
}

TEST(FlowEstimatorTest, RejectsIndivisibleResolution) {
  FlowEstimator est(small_config(EdgeMode::kPlain), 7);
  const Frame f = testing::random_frame(48, 64, 1);
  const EdgeMap e(48, 64);
  EXPECT_THROW(estimate_flow(est, f, f, e, e), std::invalid_argument);
  const Frame g = testing::random_frame(64, 64, 1);
  EXPECT_THROW(estimate_flow(est, f, g, e, e), std::invalid_argument);
}

TEST(FlowEstimatorTest, SeedDeterminesInitialization) {
  FlowEstimator a(small_config(EdgeMode::kConcat), 11), b(small_config(EdgeMode::kConcat), 11),
      c(small_config(EdgeMode::kConcat), 12);
  nn::ParameterSet pa, pb, pc;
  a.collect("f", pa);
  b.collect("f", pb);
  c.collect("f", pc);
  ASSERT_EQ(pa.params.size(), pb.params.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < pa.params.size(); ++i) {
    const auto va = pa.params[i].var->value.values(), vb = pb.params[i].var->value.values(),
               vc = pc.params[i].var->value.values();
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin())) << pa.params[i].name;
    any_diff |= !std::equal(va.begin(), va.end(), vc.begin());
  }
  EXPECT_TRUE(any_diff);
}

TEST(FlowEstimatorTest, AugmentWithUnitEdgesEqualsPlain) {
  FlowEstimator plain(small_config(EdgeMode::kPlain), 5), augment(small_config(EdgeMode::kAugment), 5);
  const Frame i0 = testing::random_frame(64, 64, 1), i1 = testing::random_frame(64, 64, 2);
  const EdgeMap ones(64, 64, 1.0f);
  const auto a = estimate_flow(plain, i0, i1, ones, ones);
  const auto b = estimate_flow(augment, i0, i1, ones, ones);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(FlowEstimatorTest, TwoStreamMirrorHookGivesFrameStream) {
  FlowEstimator est(small_config(EdgeMode::kTwoStream), 5);
  const Frame i0 = testing::random_frame(32, 64, 1), i1 = testing::random_frame(32, 64, 2);
  const EdgeMap e0 = testing::random_grid<1>(32, 64, 3), e1 = testing::random_grid<1>(32, 64, 4);
  const FlowInputs in[] = {{i0, i1, e0, e1}};
  const auto input = prepare_flow_input(EdgeMode::kTwoStream, in);
  ASSERT_EQ(input.edges.shape().c, 2);
  est.mirror_frame_stream = true;
  const auto [frames, edges] = est.forward_streams(input);
  const auto merged = est.forward(input);
  for (std::size_t i = 0; i < merged->value.size(); ++i) ASSERT_EQ(merged->value.data()[i], frames->value.data()[i]);
  est.mirror_frame_stream = false;
  const auto separate = est.forward(input);
  EXPECT_NE(separate->value.data()[0], merged->value.data()[0]);
}

TEST(RefinerTest, AttentionSumsToOne) {
  RefinerConfig rc;
  rc.channels = kSmall;
  rc.zero_init_head = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Refiner ref(rc, seed);
    const Frame i0 = testing::random_frame(32, 64, seed), i1 = testing::random_frame(32, 64, seed + 9);
    const FlowMap f01 = testing::random_grid<2>(32, 64, seed + 1, -4, 4), f10 = testing::random_grid<2>(32, 64, seed + 2, -4, 4);
    const auto r = refine_and_attend(ref, i0, i1, f01, f10, TimePoint(0.3));
    EXPECT_EQ(r.to0.height(), 32);
    EXPECT_EQ(r.to1.width(), 64);
    float worst = 0.0f;
    for (std::size_t i = 0; i < r.attention.a0.values().size(); ++i) {
      const float a0 = r.attention.a0.values()[i];
      EXPECT_GE(a0, 0.0f);
      EXPECT_LE(a0, 1.0f);
      worst = std::max(worst, std::fabs(a0 + r.attention.a1.values()[i] - 1.0f));
    }
    EXPECT_LE(worst, 1e-6f);
  }
}

TEST(RefinerTest, ZeroHeadAtTimeZeroGivesZeroFlow) {
  RefinerConfig rc;
  rc.channels = kSmall;
  Refiner ref(rc, 3);
  const Frame i0 = testing::random_frame(32, 32, 1), i1 = testing::random_frame(32, 32, 2);
  const FlowMap f01 = testing::random_grid<2>(32, 32, 3, -4, 4), f10 = testing::random_grid<2>(32, 32, 4, -4, 4);
  const auto r = refine_and_attend(ref, i0, i1, f01, f10, TimePoint(0.0));
  for (float v : r.to0.values()) EXPECT_EQ(v, 0.0f);
  for (float v : r.attention.a0.values()) EXPECT_EQ(v, 0.5f);
  // With a zero head the refined flows are the linear flows.
  const auto lin = intermediate_flows(f01, f10, TimePoint(0.7));
  const auto r7 = refine_and_attend(ref, i0, i1, f01, f10, TimePoint(0.7));
  for (std::size_t i = 0; i < lin.to1.values().size(); ++i) EXPECT_FLOAT_EQ(r7.to1.values()[i], lin.to1.values()[i]);
}

TEST(RefinerTest, ShapeMismatchThrows) {
  Refiner ref(RefinerConfig{.channels = kSmall}, 3);
  EXPECT_THROW(refine_and_attend(ref, Frame(32, 32), Frame(32, 32), FlowMap(32, 64), FlowMap(32, 32), TimePoint(0.5)),
               std::invalid_argument);
}

AttentionPair uniform_attention(int h, int w, float a0) { return {EdgeMap(h, w, a0), EdgeMap(h, w, 1.0f - a0)}; }

TEST(SynthesizeTest, Examples) {
  const Frame i0 = testing::random_frame(8, 8, 1), i1 = testing::random_frame(8, 8, 2);
  const FlowMap to0 = testing::random_grid<2>(8, 8, 3, -2, 2), to1 = testing::random_grid<2>(8, 8, 4, -2, 2);
  EXPECT_EQ(synthesize(i0, i1, to0, to1, uniform_attention(8, 8, 1.0f)), backward_warp(i0, to0));
  const Frame same = synthesize(i0, i0, FlowMap(8, 8), FlowMap(8, 8), uniform_attention(8, 8, 0.5f));
  for (std::size_t i = 0; i < same.values().size(); ++i) EXPECT_FLOAT_EQ(same.values()[i], i0.values()[i]);
  const Frame mix = synthesize(Frame(8, 8, 0.2f), Frame(8, 8, 0.6f), FlowMap(8, 8), FlowMap(8, 8),
                               uniform_attention(8, 8, 0.25f));
  for (float v : mix.values()) EXPECT_NEAR(v, 0.5f, 1e-6f);
}

TEST(SynthesizeTest, BatchedMatchesFrameForm) {
  const Frame i0 = testing::random_frame(8, 8, 5), i1 = testing::random_frame(8, 8, 6);
  const FlowMap to0 = testing::random_grid<2>(8, 8, 7, -2, 2), to1 = testing::random_grid<2>(8, 8, 8, -2, 2);
  const EdgeMap a0 = testing::random_grid<1>(8, 8, 9);
  EdgeMap a1 = a0;
  for (float& v : a1.values()) v = 1.0f - v;
  const Frame ref = synthesize(i0, i1, to0, to1, {a0, a1});
  auto var = [](const auto& g) {
    using G = std::decay_t<decltype(g)>;
    return nn::constant(stack(std::span<const G>(&g, 1)));
  };
  const auto out = synthesize(var(i0), var(i1), var(to0), var(to1), var(a0));
  const Frame got = unstack<3>(out->value, 0);
  for (std::size_t i = 0; i < got.values().size(); ++i) EXPECT_NEAR(got.values()[i], ref.values()[i], 1e-6);
}

TEST(DiscriminatorTest, MapShapeAndScoreRange) {
  for (DiscriminatorKind kind : {DiscriminatorKind::kFrame, DiscriminatorKind::kEdge}) {
    Discriminator d(kind, {.base_channels = 8}, 3);
    const int c = d.input_channels();
    nn::Tensor x(nn::Shape{2, c, 64, 64});
    std::mt19937_64 rng(1);
    for (float& v : x.values()) v = static_cast<float>(rng() % 1000) / 1000.0f;
    EXPECT_EQ(d.logits(nn::constant(x), true)->value.shape(), (nn::Shape{2, 1, 4, 4}));
    const auto s = d.forward(nn::constant(x), false);
    EXPECT_EQ(s->value.shape(), (nn::Shape{2, 1, 1, 1}));
    for (float v : s->value.values()) {
      EXPECT_GT(v, 0.0f);
      EXPECT_LT(v, 1.0f);
    }
    EXPECT_EQ(d.logits(nn::constant(nn::Tensor(nn::Shape{1, c, 96, 128})), false)->value.shape(),
              (nn::Shape{1, 1, 6, 8}));
  }
  EXPECT_EQ(Discriminator(DiscriminatorKind::kFrame, {}, 1).input_channels(), 3);
  EXPECT_EQ(Discriminator(DiscriminatorKind::kEdge, {}, 1).input_channels(), 1);
}

TEST(DiscriminatorTest, ScalarScoresAreDeterministic) {
  Discriminator a(DiscriminatorKind::kFrame, {.base_channels = 8}, 4), b(DiscriminatorKind::kFrame, {.base_channels = 8}, 4);
  const Frame f = testing::random_frame(64, 64, 2);
  const double sa = discriminate(a, f);
  EXPECT_GT(sa, 0.0);
  EXPECT_LT(sa, 1.0);
  EXPECT_EQ(sa, discriminate(b, f));
  EXPECT_EQ(sa, discriminate(a, f));
  Discriminator e(DiscriminatorKind::kEdge, {.base_channels = 8}, 4);
  const double se = discriminate(e, testing::random_grid<1>(64, 80, 3));
  EXPECT_GT(se, 0.0);
  EXPECT_LT(se, 1.0);
}

TEST(DiscriminatorTest, Errors) {
  Discriminator d(DiscriminatorKind::kFrame, {.base_channels = 8}, 4);
  EXPECT_THROW(discriminate(d, testing::random_frame(32, 64, 1)), std::invalid_argument);
  EXPECT_THROW(discriminate(d, testing::random_grid<1>(64, 64, 1)), std::invalid_argument);
  Discriminator e(DiscriminatorKind::kEdge, {.base_channels = 8}, 4);
  EXPECT_THROW(discriminate(e, testing::random_frame(64, 64, 1)), std::invalid_argument);
  EXPECT_THROW(Discriminator(DiscriminatorKind::kEdge, {.base_channels = 0}, 1), std::invalid_argument);
}

TEST(DiscriminatorTest, GradientReachesInput) {
  Discriminator d(DiscriminatorKind::kEdge, {.base_channels = 8}, 4);
  nn::Var x = nn::parameter(nn::Tensor(nn::Shape{2, 1, 64, 64}, 0.3f));
  x->value.data()[5] = 0.9f;
  nn::backward(nn::mean(d.forward(x, true)));
  ASSERT_TRUE(x->has_grad());
  double norm = 0.0;
  for (float g : x->grad.values()) norm += std::fabs(g);
  EXPECT_GT(norm, 0.0);
}

}  // namespace
}  // namespace eainterp
