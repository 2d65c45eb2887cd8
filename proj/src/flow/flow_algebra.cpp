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

#include "eainterp/flow_algebra.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "eainterp/planar.hpp"
#include "eainterp/warp_kernels.hpp"

namespace eainterp {

Frame backward_warp(const Frame& source, const FlowMap& flow) {
  require_same_extent(source, flow, "backward_warp");
  const auto src = to_planar(source);
  const auto fl = to_planar(flow);
  std::vector<float> out(src.size());
  kernels::warp_forward(src.data(), 3, source.height(), source.width(), fl.data(), out.data());
  return from_planar<3>(out.data(), source.height(), source.width());
}

IntermediateFlows intermediate_flows(const FlowMap& f01, const FlowMap& f10, TimePoint t,
                                     FlowForm form) {
  require_same_extent(f01, f10, "intermediate_flows");
  const float tf = static_cast<float>(t.value());
  const float rf = static_cast<float>(1.0 - t.value());
  IntermediateFlows out{FlowMap(f01.height(), f01.width()), FlowMap(f01.height(), f01.width())};
  const auto a = f01.values();
  const auto b = f10.values();
  auto to0 = out.to0.values();
  auto to1 = out.to1.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (form == FlowForm::kForwardLiteral) {
      to0[i] = -(tf * a[i]);
      to1[i] = rf * a[i];
    } else {
      to0[i] = 0.5f * (tf * b[i] - tf * a[i]);
      to1[i] = 0.5f * (rf * a[i] - rf * b[i]);
    }
  }
  return out;
}

Frame naive_synthesize(const Frame& i0, const Frame& i1, const FlowMap& f01, const FlowMap& f10,
                       TimePoint t, SynthesisSide side, FlowForm form) {
  require_same_extent(i0, i1, "naive_synthesize");
  require_same_extent(i0, f01, "naive_synthesize");
  const auto flows = intermediate_flows(f01, f10, t, form);
  switch (side) {
    case SynthesisSide::kFrom0:
      return backward_warp(i0, flows.to0);
    case SynthesisSide::kFrom1:
      return backward_warp(i1, flows.to1);
    case SynthesisSide::kMean:
      break;
  }
  Frame a = backward_warp(i0, flows.to0);
  const Frame b = backward_warp(i1, flows.to1);
  auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] = 0.5f * av[i] + 0.5f * bv[i];
  return a;
}

namespace {

constexpr float kFloMagic = 202021.25f;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t float_bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

float bits_float(std::uint32_t u) {
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void write_flo(const FlowMap& flow, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FloError(path.string() + ": cannot open for writing");
  put_u32(out, float_bits(kFloMagic));
  put_u32(out, static_cast<std::uint32_t>(flow.width()));
  put_u32(out, static_cast<std::uint32_t>(flow.height()));
  for (float v : flow.values()) put_u32(out, float_bits(v));
  out.flush();
  if (!out) throw FloError(path.string() + ": write failed");
}

FlowMap read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FloError(path.string() + ": cannot open");
  unsigned char head[12];
  in.read(reinterpret_cast<char*>(head), 12);
  if (in.gcount() < 4 || bits_float(get_u32(head)) != kFloMagic) {
    throw FloError(path.string() + ": bad magic (not a Middlebury .flo file)");
  }
  if (in.gcount() < 12) throw FloError(path.string() + ": truncated header");
  const std::uint32_t w = get_u32(head + 4);
  const std::uint32_t h = get_u32(head + 8);
  if (w == 0 || h == 0 || w > 100000 || h > 100000) {
    throw FloError(path.string() + ": implausible extent " + std::to_string(w) + "x" + std::to_string(h));
  }
  FlowMap flow(static_cast<int>(h), static_cast<int>(w));
  auto values = flow.values();
  std::vector<unsigned char> raw(values.size() * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FloError(path.string() + ": truncated payload");
  }
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = bits_float(get_u32(raw.data() + 4 * i));
  return flow;
}

Frame flow_to_color(const FlowMap& flow, std::optional<double> max_magnitude) {
  double scale = max_magnitude.value_or(0.0);
  if (!max_magnitude) {
    for (int y = 0; y < flow.height(); ++y) {
      for (int x = 0; x < flow.width(); ++x) {
        scale = std::max(scale, std::hypot(double{flow.at(y, x, 0)}, double{flow.at(y, x, 1)}));
      }
    }
  }
  if (!(scale > 0.0)) scale = 1.0;

  Frame out(flow.height(), flow.width());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double u = flow.at(y, x, 0);
      const double v = flow.at(y, x, 1);
      const double sat = std::min(std::hypot(u, v) / scale, 1.0);
      double hue = std::atan2(v, u) * 3.0 / std::numbers::pi;  // sextants in (-3, 3]
      if (hue < 0.0) hue += 6.0;
      const int sector = static_cast<int>(hue) % 6;
      const double f = hue - std::floor(hue);
      // HSV -> RGB with V = 1.
      const double p = 1.0 - sat;
      const double q = 1.0 - sat * f;
      const double r = 1.0 - sat * (1.0 - f);
      double rgb[3];
      switch (sector) {
        case 0: rgb[0] = 1, rgb[1] = r, rgb[2] = p; break;
        case 1: rgb[0] = q, rgb[1] = 1, rgb[2] = p; break;
        case 2: rgb[0] = p, rgb[1] = 1, rgb[2] = r; break;
        case 3: rgb[0] = p, rgb[1] = q, rgb[2] = 1; break;
        case 4: rgb[0] = r, rgb[1] = p, rgb[2] = 1; break;
        default: rgb[0] = 1, rgb[1] = p, rgb[2] = q; break;
      }
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = static_cast<float>(rgb[c]);
    }
  }
  return out;
}

}  // namespace eainterp
