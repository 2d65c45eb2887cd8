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

#include "eainterp/models.hpp"

#include <algorithm>
#include <stdexcept>

#include "eainterp/edge_fusion.hpp"
#include "eainterp/tensor_bridge.hpp"

namespace eainterp {

using nn::Var;

std::string to_string(EdgeMode mode) {
  switch (mode) {
    case EdgeMode::kPlain: return "plain";
    case EdgeMode::kAugment: return "augment";
    case EdgeMode::kConcat: return "concat";
    case EdgeMode::kTwoStream: return "two_stream";
  }
  return "plain";
}

EdgeMode parse_edge_mode(const std::string& name) {
  for (EdgeMode m : {EdgeMode::kPlain, EdgeMode::kAugment, EdgeMode::kConcat, EdgeMode::kTwoStream}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown edge mode '" + name +
                              "' (expected plain, augment, concat or two_stream)");
}

int FlowUNetConfig::input_channels() const { return input_mode == EdgeMode::kConcat ? 12 : 6; }

int FlowUNetConfig::edge_stream_channels() const {
  return input_mode == EdgeMode::kTwoStream ? 2 : 0;
}

void FlowUNetConfig::validate() const {
  if (encoder_channels.size() != 6) {
    throw std::invalid_argument("encoder_channels must list exactly 6 widths, got " +
                                std::to_string(encoder_channels.size()));
  }
  for (int c : encoder_channels) {
    if (c <= 0) throw std::invalid_argument("encoder_channels must be positive");
  }
}

namespace {

MultiChannelImage frame_channels(const Frame& f) {
  MultiChannelImage out(f.height(), f.width(), 3);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = f.at(y, x, c);
    }
  }
  return out;
}

MultiChannelImage join(const MultiChannelImage& a, const MultiChannelImage& b) {
  MultiChannelImage out(a.height(), a.width(), a.channels() + b.channels());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      for (int c = 0; c < a.channels(); ++c) out.at(y, x, c) = a.at(y, x, c);
      for (int c = 0; c < b.channels(); ++c) out.at(y, x, a.channels() + c) = b.at(y, x, c);
    }
  }
  return out;
}

}  // namespace

FlowNetworkInput prepare_flow_input(EdgeMode mode, std::span<const FlowInputs> batch) {
  FlowNetworkInput out;
  if (batch.empty()) return out;
  std::vector<MultiChannelImage> frames;
  std::vector<MultiChannelImage> edges;
  for (const auto& s : batch) {
    require_same_extent(s.i0, s.i1, "flow input");
    require_same_extent(s.i0, s.e0, "flow input");
    require_same_extent(s.i0, s.e1, "flow input");
    switch (mode) {
      case EdgeMode::kAugment:
        frames.push_back(join(edge_augment(s.i0, s.e0), edge_augment(s.i1, s.e1)));
        break;
      case EdgeMode::kConcat:
        frames.push_back(join(edge_concat(s.i0, s.e0), edge_concat(s.i1, s.e1)));
        break;
      case EdgeMode::kPlain:
      case EdgeMode::kTwoStream:
        frames.push_back(join(frame_channels(s.i0), frame_channels(s.i1)));
        break;
    }
    if (mode == EdgeMode::kTwoStream) {
      MultiChannelImage pair(s.e0.height(), s.e0.width(), 2);
      for (int y = 0; y < pair.height(); ++y) {
        for (int x = 0; x < pair.width(); ++x) {
          pair.at(y, x, 0) = s.e0.at(y, x);
          pair.at(y, x, 1) = s.e1.at(y, x);
        }
      }
      edges.push_back(std::move(pair));
    }
  }
  out.frames = stack(std::span<const MultiChannelImage>(frames));
  if (!edges.empty()) out.edges = stack(std::span<const MultiChannelImage>(edges));
  return out;
}

FlowEstimator::FlowEstimator(FlowUNetConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  frame_net_ = UNet(config_.input_channels(), 4, config_.encoder_channels, config_.leaky_slope, rng);
  if (config_.input_mode == EdgeMode::kTwoStream) {
    edge_net_ = UNet(config_.edge_stream_channels(), 4, config_.encoder_channels, config_.leaky_slope, rng);
  }
}

std::pair<Var, Var> FlowEstimator::forward_streams(const FlowNetworkInput& input) const {
  Var frames = frame_net_(nn::constant(input.frames));
  if (!edge_net_) return {frames, nullptr};
  if (input.edges.empty()) throw std::invalid_argument("two_stream estimator needs edge input");
  Var edges = mirror_frame_stream ? frames : (*edge_net_)(nn::constant(input.edges));
  return {frames, edges};
}

Var FlowEstimator::forward(const FlowNetworkInput& input) const {
  auto [frames, edges] = forward_streams(input);
  if (!edges) return frames;
  return nn::scale(nn::add(frames, edges), 0.5f);
}

void FlowEstimator::collect(const std::string& prefix, nn::ParameterSet& out) {
  frame_net_.collect(prefix + ".frame", out);
  if (edge_net_) edge_net_->collect(prefix + ".edge", out);
}

FlowEstimator build_flow_estimator(const FlowUNetConfig& config, std::uint64_t seed) {
  return FlowEstimator(config, seed);
}

std::pair<FlowMap, FlowMap> estimate_flow(const FlowEstimator& est, const Frame& i0,
                                          const Frame& i1, const EdgeMap& e0, const EdgeMap& e1) {
  const FlowInputs in[] = {{i0, i1, e0, e1}};
  const Var out = est.forward(prepare_flow_input(est.config().input_mode, in));
  return {unstack<2>(out->value, 0, 0), unstack<2>(out->value, 0, 2)};
}

std::pair<Var, Var> intermediate_flows(const Var& f01, const Var& f10, std::span<const float> t,
                                       FlowForm form) {
  std::vector<float> tf(t.begin(), t.end());
  std::vector<float> rf(t.size()), neg(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    rf[i] = static_cast<float>(1.0 - static_cast<double>(t[i]));
    neg[i] = -tf[i];
  }
  if (form == FlowForm::kForwardLiteral) {
    return {nn::scale_per_sample(f01, neg), nn::scale_per_sample(f01, rf)};
  }
  Var to0 = nn::scale(nn::sub(nn::scale_per_sample(f10, tf), nn::scale_per_sample(f01, tf)), 0.5f);
  Var to1 = nn::scale(nn::sub(nn::scale_per_sample(f01, rf), nn::scale_per_sample(f10, rf)), 0.5f);
  return {to0, to1};
}

Refiner::Refiner(RefinerConfig config, std::uint64_t seed) : config_(std::move(config)) {
  std::mt19937_64 rng(seed);
  net_ = UNet(kRefinerInputChannels, kRefinerOutputChannels, config_.channels, config_.leaky_slope, rng);
  if (config_.zero_init_head) net_.head().zero_init();
}

RefinedFlows Refiner::forward(const Var& i0, const Var& i1, const Var& f01, const Var& f10,
                              std::span<const float> t, FlowForm form) const {
  auto [lin0, lin1] = intermediate_flows(f01, f10, t, form);
  const Var parts[] = {i0, i1, f01, f10, lin0, lin1, nn::warp(i0, lin0), nn::warp(i1, lin1)};
  const Var out = net_(nn::concat_channels(parts));
  RefinedFlows r;
  r.linear_to0 = lin0;
  r.linear_to1 = lin1;
  if (config_.residual) {
    r.to0 = nn::add(lin0, nn::slice_channels(out, 0, 2));
    r.to1 = nn::add(lin1, nn::slice_channels(out, 2, 2));
  } else {
    r.to0 = nn::slice_channels(out, 0, 2);
    r.to1 = nn::slice_channels(out, 2, 2);
  }
  r.a0 = nn::sigmoid(nn::slice_channels(out, 4, 1));
  return r;
}

void Refiner::collect(const std::string& prefix, nn::ParameterSet& out) {
  net_.collect(prefix + ".net", out);
}

RefineResult refine_and_attend(const Refiner& ref, const Frame& i0, const Frame& i1,
                               const FlowMap& f01, const FlowMap& f10, TimePoint t, FlowForm form) {
  require_same_extent(i0, i1, "refine_and_attend");
  require_same_extent(i0, f01, "refine_and_attend");
  require_same_extent(i0, f10, "refine_and_attend");
  const float tv[] = {static_cast<float>(t.value())};
  auto as_var = [](const auto& img) {
    using G = std::decay_t<decltype(img)>;
    return nn::constant(stack(std::span<const G>(&img, 1)));
  };
  const RefinedFlows r = ref.forward(as_var(i0), as_var(i1), as_var(f01), as_var(f10), tv, form);
  RefineResult out;
  out.to0 = unstack<2>(r.to0->value, 0);
  out.to1 = unstack<2>(r.to1->value, 0);
  out.attention.a0 = unstack<1>(r.a0->value, 0);
  out.attention.a1 = EdgeMap(i0.height(), i0.width());
  auto a0 = out.attention.a0.values();
  auto a1 = out.attention.a1.values();
  for (std::size_t i = 0; i < a0.size(); ++i) a1[i] = 1.0f - a0[i];
  return out;
}

Frame synthesize(const Frame& i0, const Frame& i1, const FlowMap& to0, const FlowMap& to1,
                 const AttentionPair& attention) {
  require_same_extent(i0, i1, "synthesize");
  require_same_extent(i0, to0, "synthesize");
  require_same_extent(i0, to1, "synthesize");
  require_same_extent(i0, attention.a0, "synthesize");
  require_same_extent(i0, attention.a1, "synthesize");
  Frame out = backward_warp(i0, to0);
  const Frame w1 = backward_warp(i1, to1);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const float a0 = attention.a0.at(y, x);
      const float a1 = attention.a1.at(y, x);
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = std::clamp(a0 * out.at(y, x, c) + a1 * w1.at(y, x, c), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

Var synthesize(const Var& i0, const Var& i1, const Var& to0, const Var& to1, const Var& a0) {
  const Var a1 = nn::add_scalar(nn::scale(a0, -1.0f), 1.0f);
  const Var blend = nn::add(nn::mul_broadcast(nn::warp(i0, to0), a0),
                            nn::mul_broadcast(nn::warp(i1, to1), a1));
  return nn::clamp(blend, 0.0f, 1.0f);
}

Discriminator::Discriminator(DiscriminatorKind kind, DiscriminatorConfig config, std::uint64_t seed)
    : kind_(kind), slope_(config.leaky_slope) {
  if (config.base_channels <= 0) throw std::invalid_argument("discriminator width must be positive");
  std::mt19937_64 rng(seed);
  int prev = input_channels();
  for (int i = 0; i < 4; ++i) {
    const int out = config.base_channels << i;
    convs_.emplace_back(prev, out, 4, 2, 1, slope_, rng);
    norms_.emplace_back(out);
    prev = out;
  }
  project_ = nn::Conv2d(prev, 1, 1, 1, 0, 1.0f, rng);
}

Var Discriminator::logits(const Var& x, bool training) {
  const auto& s = x->value.shape();
  if (s.c != input_channels()) {
    throw std::invalid_argument("discriminator expects " + std::to_string(input_channels()) +
                                " channels, got " + std::to_string(s.c));
  }
  if (s.h < kMinExtent || s.w < kMinExtent) {
    throw std::invalid_argument("discriminator input " + std::to_string(s.h) + "x" +
                                std::to_string(s.w) + " is smaller than 64x64");
  }
  ++forward_calls_;
  Var h = x;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = nn::leaky_relu(norms_[i](convs_[i](h), training), slope_);
  }
  return project_(h);
}

Var Discriminator::forward(const Var& x, bool training) {
  return nn::mean_per_sample(nn::sigmoid(logits(x, training)));
}

void Discriminator::collect(const std::string& prefix, nn::ParameterSet& out) {
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].collect(prefix + ".conv" + std::to_string(i), out);
    norms_[i].collect(prefix + ".bn" + std::to_string(i), out);
  }
  project_.collect(prefix + ".project", out);
}

double discriminate(Discriminator& d, const Frame& image) {
  return d.forward(nn::constant(stack(std::span<const Frame>(&image, 1))), false)->value.data()[0];
}

double discriminate(Discriminator& d, const EdgeMap& image) {
  return d.forward(nn::constant(stack(std::span<const EdgeMap>(&image, 1))), false)->value.data()[0];
}

}  // namespace eainterp
