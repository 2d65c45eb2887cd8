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

#include <cstring>
#include <fstream>

#include "eainterp/flow_algebra.hpp"
#include "test_util.hpp"

namespace eainterp {
namespace {

FlowMap constant_flow(int h, int w, float u, float v) {
  FlowMap f(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) f.at(y, x, 0) = u, f.at(y, x, 1) = v;
  return f;
}

TEST(WarpTest, ZeroFlowIsIdentity) {
  const Frame f = testing::random_frame(9, 11, 1);
  EXPECT_EQ(backward_warp(f, FlowMap(9, 11)), f);
}

TEST(WarpTest, IntegerShiftMatchesIndexOracle) {
  const Frame f = testing::random_frame(6, 8, 2);
  for (auto [u, v] : {std::pair{1, 0}, std::pair{-2, 1}, std::pair{0, -3}}) {
    const Frame out = backward_warp(f, constant_flow(6, 8, static_cast<float>(u), static_cast<float>(v)));
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 8; ++x)
        for (int c = 0; c < 3; ++c)
          EXPECT_EQ(out.at(y, x, c), f.at(std::clamp(y + v, 0, 5), std::clamp(x + u, 0, 7), c));
  }
}

TEST(WarpTest, BilinearMidpoint) {
  Frame f(1, 2);
  for (int c = 0; c < 3; ++c) f.at(0, 1, c) = 1.0f;
  FlowMap flow(1, 2);
  flow.at(0, 0, 0) = 0.5f;
  EXPECT_FLOAT_EQ(backward_warp(f, flow).at(0, 0, 0), 0.5f);
}

TEST(WarpTest, ShapeMismatchThrows) {
  EXPECT_THROW(backward_warp(Frame(4, 4), FlowMap(4, 5)), std::invalid_argument);
}

TEST(TimePointTest, RangeChecked) {
  EXPECT_NO_THROW(TimePoint(0.0));
  EXPECT_NO_THROW(TimePoint(1.0));
  EXPECT_THROW(TimePoint(-0.01), std::invalid_argument);
  EXPECT_THROW(TimePoint(1.5), std::invalid_argument);
  EXPECT_THROW(TimePoint(std::nan("")), std::invalid_argument);
}

TEST(IntermediateFlowTest, SubstitutionExample) {
  const FlowMap f01 = constant_flow(3, 3, 8, 0), f10 = constant_flow(3, 3, -8, 0);
  for (FlowForm form : {FlowForm::kForwardLiteral, FlowForm::kSymmetric}) {
    const auto r = intermediate_flows(f01, f10, TimePoint(0.25), form);
    EXPECT_EQ(r.to0.at(1, 1, 0), -2.0f);
    EXPECT_EQ(r.to0.at(1, 1, 1), 0.0f);
    EXPECT_EQ(r.to1.at(1, 1, 0), 6.0f);
    EXPECT_EQ(r.to1.at(1, 1, 1), 0.0f);
  }
}

TEST(IntermediateFlowTest, EndpointsAreZero) {
  const FlowMap f01 = testing::random_grid<2>(4, 5, 3, -4, 4), f10 = testing::random_grid<2>(4, 5, 4, -4, 4);
  for (FlowForm form : {FlowForm::kForwardLiteral, FlowForm::kSymmetric}) {
    const auto at0 = intermediate_flows(f01, f10, TimePoint(0.0), form);
    const auto at1 = intermediate_flows(f01, f10, TimePoint(1.0), form);
    for (float v : at0.to0.values()) EXPECT_EQ(v, 0.0f);
    for (float v : at1.to1.values()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(IntermediateFlowTest, LiteralFormIsExactlyLinear) {
  const FlowMap f01 = testing::random_grid<2>(5, 5, 5, -6, 6), f10 = testing::random_grid<2>(5, 5, 6, -6, 6);
  for (double t : {0.125, 0.3, 0.5, 0.875}) {
    const auto r = intermediate_flows(f01, f10, TimePoint(t), FlowForm::kForwardLiteral);
    for (std::size_t i = 0; i < f01.values().size(); ++i) {
      EXPECT_EQ(r.to0.values()[i], static_cast<float>(-t) * f01.values()[i]);
      EXPECT_EQ(r.to1.values()[i], static_cast<float>(1.0 - t) * f01.values()[i]);
    }
  }
}

TEST(IntermediateFlowTest, FormsAgreeWhenFlowsAreOpposite) {
  const FlowMap f01 = testing::random_grid<2>(5, 5, 7, -6, 6);
  FlowMap f10 = f01;
  for (float& v : f10.values()) v = -v;
  for (double t : {0.1, 0.5, 0.9}) {
    const auto a = intermediate_flows(f01, f10, TimePoint(t), FlowForm::kForwardLiteral);
    const auto b = intermediate_flows(f01, f10, TimePoint(t), FlowForm::kSymmetric);
    for (std::size_t i = 0; i < f01.values().size(); ++i) {
      EXPECT_FLOAT_EQ(a.to0.values()[i], b.to0.values()[i]);
      EXPECT_FLOAT_EQ(a.to1.values()[i], b.to1.values()[i]);
    }
  }
}

TEST(IntermediateFlowTest, ShapeMismatchThrows) {
  EXPECT_THROW(intermediate_flows(FlowMap(3, 3), FlowMap(3, 4), TimePoint(0.5)), std::invalid_argument);
}

TEST(NaiveSynthesisTest, Endpoints) {
  const Frame i0 = testing::random_frame(6, 6, 8), i1 = testing::random_frame(6, 6, 9);
  const FlowMap f01 = testing::random_grid<2>(6, 6, 10, -2, 2), f10 = testing::random_grid<2>(6, 6, 11, -2, 2);
  EXPECT_EQ(naive_synthesize(i0, i1, f01, f10, TimePoint(0.0), SynthesisSide::kFrom0), i0);
  EXPECT_EQ(naive_synthesize(i0, i1, f01, f10, TimePoint(1.0), SynthesisSide::kFrom1), i1);
  const Frame mean = naive_synthesize(i0, i0, FlowMap(6, 6), FlowMap(6, 6), TimePoint(0.4), SynthesisSide::kMean);
  for (std::size_t i = 0; i < mean.values().size(); ++i) EXPECT_FLOAT_EQ(mean.values()[i], i0.values()[i]);
}

TEST(FloTest, SingleZeroPixelIsTwentyBytes) {
  testing::TempDir dir("flo1");
  write_flo(FlowMap(1, 1), dir / "z.flo");
  EXPECT_EQ(std::filesystem::file_size(dir / "z.flo"), 20u);
  std::ifstream in(dir / "z.flo", std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "PIEH");
  float tag;
  std::memcpy(&tag, magic, 4);
  EXPECT_EQ(tag, 202021.25f);
}

TEST(FloTest, RoundTripIsBitwise) {
  testing::TempDir dir("flo2");
  FlowMap f = testing::random_grid<2>(5, 7, 12, -50, 50);
  f.at(0, 0, 0) = -0.0f;
  f.at(0, 0, 1) = 1e-40f;  // denormal
  write_flo(f, dir / "r.flo");
  const FlowMap g = read_flo(dir / "r.flo");
  ASSERT_EQ(g.height(), 5);
  ASSERT_EQ(g.width(), 7);
  EXPECT_EQ(std::memcmp(f.values().data(), g.values().data(), f.values().size_bytes()), 0);
  {
    std::ifstream in(dir / "r.flo", std::ios::binary);
    in.seekg(4);
    std::int32_t wh[2];
    in.read(reinterpret_cast<char*>(wh), 8);
    EXPECT_EQ(wh[0], 7);
    EXPECT_EQ(wh[1], 5);
  }
}

TEST(FloTest, ReadErrors) {
  testing::TempDir dir("flo3");
  EXPECT_THROW(read_flo(dir / "missing.flo"), FloError);
  std::ofstream(dir / "bad.flo", std::ios::binary) << "ABCD" << std::string(16, '\0');
  EXPECT_THROW(read_flo(dir / "bad.flo"), FloError);
  write_flo(FlowMap(3, 3), dir / "ok.flo");
  std::filesystem::resize_file(dir / "ok.flo", 40);
  EXPECT_THROW(read_flo(dir / "ok.flo"), FloError);
  std::filesystem::resize_file(dir / "ok.flo", 6);
  EXPECT_THROW(read_flo(dir / "ok.flo"), FloError);
  EXPECT_THROW(write_flo(FlowMap(1, 1), dir / "nope" / "x.flo"), FloError);
}

TEST(FlowColorTest, ZeroFlowIsWhite) {
  const Frame c = flow_to_color(FlowMap(4, 4));
  for (float v : c.values()) EXPECT_EQ(v, 1.0f);
}

TEST(FlowColorTest, OppositeDirectionsAreComplementary) {
  for (auto [u, v] : {std::pair{3.0f, 0.0f}, std::pair{0.0f, 2.0f}, std::pair{1.5f, -2.5f}}) {
    FlowMap f(1, 2);
    f.at(0, 0, 0) = u, f.at(0, 0, 1) = v;
    f.at(0, 1, 0) = -u, f.at(0, 1, 1) = -v;
    const Frame c = flow_to_color(f);
    const float sum0 = c.at(0, 0, 0) + c.at(0, 1, 0);
    EXPECT_NEAR(c.at(0, 0, 1) + c.at(0, 1, 1), sum0, 1e-6);
    EXPECT_NEAR(c.at(0, 0, 2) + c.at(0, 1, 2), sum0, 1e-6);
    // Both are at full saturation, so each channel pair sums to 2 - 1.
    EXPECT_NEAR(sum0, 1.0f, 1e-6);
  }
}

TEST(FlowColorTest, SaturationClampsAtMaxMagnitude) {
  FlowMap f(1, 2);
  f.at(0, 0, 0) = 2.0f, f.at(0, 0, 1) = 2.0f;
  f.at(0, 1, 0) = 20.0f, f.at(0, 1, 1) = 20.0f;
  const Frame c = flow_to_color(f, std::hypot(2.0, 2.0));
  for (int ch = 0; ch < 3; ++ch) EXPECT_FLOAT_EQ(c.at(0, 0, ch), c.at(0, 1, ch));
  // Default normalization uses the map's own maximum.
  const Frame d = flow_to_color(f);
  EXPECT_FALSE(d.at(0, 0, 1) == d.at(0, 1, 1) && d.at(0, 0, 2) == d.at(0, 1, 2));
}

}  // namespace
}  // namespace eainterp
