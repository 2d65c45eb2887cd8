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

#include "eainterp/pipeline.hpp"

#include <stdexcept>

#include "eainterp/nn/ops.hpp"
#include "eainterp/tensor_bridge.hpp"

namespace eainterp {

using nn::Var;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PipelineBatch make_batch(const ModelConfig& config, std::span<const Frame> i0,
                         std::span<const Frame> i1, std::span<const float> t) {
  if (i0.empty() || i0.size() != i1.size() || i0.size() != t.size()) {
    throw std::invalid_argument("make_batch: inconsistent batch sizes");
  }
  std::vector<EdgeMap> e0, e1;
  std::vector<FlowInputs> inputs;
  e0.reserve(i0.size());
  e1.reserve(i0.size());
  for (std::size_t k = 0; k < i0.size(); ++k) {
    require_same_extent(i0[k], i0[0], "make_batch");
    require_same_extent(i1[k], i0[0], "make_batch");
    if (config.flow.input_mode == EdgeMode::kPlain) {
      e0.emplace_back(i0[k].height(), i0[k].width());
      e1.emplace_back(i0[k].height(), i0[k].width());
    } else {
      e0.push_back(canny_edges(i0[k], config.canny));
      e1.push_back(canny_edges(i1[k], config.canny));
    }
  }
  for (std::size_t k = 0; k < i0.size(); ++k) inputs.push_back({i0[k], i1[k], e0[k], e1[k]});
  PipelineBatch b;
  b.i0 = nn::constant(stack(i0));
  b.i1 = nn::constant(stack(i1));
  b.flow_input = prepare_flow_input(config.flow.input_mode, inputs);
  b.t.assign(t.begin(), t.end());
  return b;
}

Interpolator::Interpolator(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)), estimator_(config_.flow, derive_seed(seed, 0)) {
  if (config_.refinement) refiner_.emplace(config_.refiner, derive_seed(seed, 1));
}

PipelineOutput Interpolator::forward(const PipelineBatch& batch) const {
  PipelineOutput o;
  const Var flows = estimator_.forward(batch.flow_input);
  o.f01 = nn::slice_channels(flows, 0, 2);
  o.f10 = nn::slice_channels(flows, 2, 2);
  const auto& s = batch.i0->value.shape();
  Var half = nn::constant(nn::Tensor({s.n, 1, s.h, s.w}, 0.5f));
  if (refiner_) {
    const RefinedFlows r = refiner_->forward(batch.i0, batch.i1, o.f01, o.f10, batch.t, config_.flow_form);
    o.linear_to0 = r.linear_to0;
    o.linear_to1 = r.linear_to1;
    o.to0 = r.to0;
    o.to1 = r.to1;
    o.a0 = config_.attention ? r.a0 : half;
  } else {
    std::tie(o.linear_to0, o.linear_to1) = intermediate_flows(o.f01, o.f10, batch.t, config_.flow_form);
    o.to0 = o.linear_to0;
    o.to1 = o.linear_to1;
    o.a0 = half;
  }
  o.frame = synthesize(batch.i0, batch.i1, o.to0, o.to1, o.a0);
  return o;
}

int padded_extent(int n) { return (n + 31) / 32 * 32; }

template <int C>
PixelGrid<C> reflect_pad(const PixelGrid<C>& img, int height, int width) {
  const int h = img.height();
  const int w = img.width();
  if (height < h || width < w || height - h >= h || width - w >= w) {
    throw std::invalid_argument("reflect_pad: padding must be smaller than the image");
  }
  PixelGrid<C> out(height, width);
  for (int y = 0; y < height; ++y) {
    const int sy = y < h ? y : 2 * (h - 1) - y;
    for (int x = 0; x < width; ++x) {
      const int sx = x < w ? x : 2 * (w - 1) - x;
      for (int c = 0; c < C; ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

template <int C>
PixelGrid<C> crop(const PixelGrid<C>& img, int height, int width) {
  if (height > img.height() || width > img.width()) throw std::invalid_argument("crop: larger than image");
  PixelGrid<C> out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < C; ++c) out.at(y, x, c) = img.at(y, x, c);
  return out;
}

template PixelGrid<1> reflect_pad(const PixelGrid<1>&, int, int);
template PixelGrid<2> reflect_pad(const PixelGrid<2>&, int, int);
template PixelGrid<3> reflect_pad(const PixelGrid<3>&, int, int);
template PixelGrid<1> crop(const PixelGrid<1>&, int, int);
template PixelGrid<2> crop(const PixelGrid<2>&, int, int);
template PixelGrid<3> crop(const PixelGrid<3>&, int, int);

Interpolation Interpolator::interpolate(const Frame& i0, const Frame& i1, TimePoint t) const {
  require_same_extent(i0, i1, "interpolate");
  const int h = i0.height();
  const int w = i0.width();
  const int ph = padded_extent(h);
  const int pw = padded_extent(w);
  Interpolation r;
  r.padded = ph != h || pw != w;
  const Frame p0 = r.padded ? reflect_pad(i0, ph, pw) : i0;
  const Frame p1 = r.padded ? reflect_pad(i1, ph, pw) : i1;
  const float tv = static_cast<float>(t.value());
  const PipelineOutput o = forward(make_batch(config_, std::span(&p0, 1), std::span(&p1, 1), std::span(&tv, 1)));
  r.frame = crop(unstack<3>(o.frame->value, 0), h, w);
  r.f01 = crop(unstack<2>(o.f01->value, 0), h, w);
  r.f10 = crop(unstack<2>(o.f10->value, 0), h, w);
  r.to0 = crop(unstack<2>(o.to0->value, 0), h, w);
  r.to1 = crop(unstack<2>(o.to1->value, 0), h, w);
  r.attention.a0 = crop(unstack<1>(o.a0->value, 0), h, w);
  r.attention.a1 = EdgeMap(h, w);
  auto a0 = r.attention.a0.values();
  auto a1 = r.attention.a1.values();
  for (std::size_t i = 0; i < a0.size(); ++i) a1[i] = 1.0f - a0[i];
  return r;
}

void Interpolator::collect(nn::ParameterSet& out) {
  estimator_.collect("flow", out);
  if (refiner_) refiner_->collect("refine", out);
}

nn::ParameterSet Interpolator::parameters() {
  nn::ParameterSet s;
  collect(s);
  return s;
}

}  // namespace eainterp
