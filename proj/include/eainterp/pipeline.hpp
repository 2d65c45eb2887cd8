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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eainterp/flow_algebra.hpp"
#include "eainterp/image.hpp"
#include "eainterp/imaging.hpp"
#include "eainterp/models.hpp"
#include "eainterp/nn/autograd.hpp"
#include "eainterp/nn/layers.hpp"

namespace eainterp {

// Independent sub-seeds for the networks built from one run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct ModelConfig {
  FlowUNetConfig flow;
  RefinerConfig refiner;
  // Off: no refiner network, linear intermediate flows and a 0.5 / 0.5 blend.
  bool refinement = true;
  // Off: the attention logit is ignored and both weights are 0.5.
  bool attention = true;
  FlowForm flow_form = FlowForm::kSymmetric;
  CannyParams canny;
};

// Network-ready batch. Edge maps for the flow estimator are Canny edges of
// the input frames.
struct PipelineBatch {
  nn::Var i0;
  nn::Var i1;
  FlowNetworkInput flow_input;
  std::vector<float> t;
  int size() const { return static_cast<int>(t.size()); }
};

PipelineBatch make_batch(const ModelConfig& config, std::span<const Frame> i0,
                         std::span<const Frame> i1, std::span<const float> t);

struct PipelineOutput {
  nn::Var f01;
  nn::Var f10;
  nn::Var linear_to0;
  nn::Var linear_to1;
  nn::Var to0;
  nn::Var to1;
  nn::Var a0;
  nn::Var frame;
};

struct Interpolation {
  Frame frame;
  FlowMap f01;
  FlowMap f10;
  FlowMap to0;
  FlowMap to1;
  AttentionPair attention;
  // True when the inputs were reflect-padded to a multiple of 32.
  bool padded = false;
};

class Interpolator {
 public:
  Interpolator(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  FlowEstimator& estimator() { return estimator_; }
  const FlowEstimator& estimator() const { return estimator_; }
  bool has_refiner() const { return refiner_.has_value(); }

  PipelineOutput forward(const PipelineBatch& batch) const;

  // Any extent of at least 32 px; inputs that are not multiples of 32 are
  // reflect-padded on the bottom and right, and outputs cropped back.
  Interpolation interpolate(const Frame& i0, const Frame& i1, TimePoint t) const;

  void collect(nn::ParameterSet& out);
  nn::ParameterSet parameters();

 private:
  ModelConfig config_;
  FlowEstimator estimator_;
  std::optional<Refiner> refiner_;
};

// Smallest multiple of 32 not below n.
int padded_extent(int n);
template <int C>
PixelGrid<C> reflect_pad(const PixelGrid<C>& img, int height, int width);
template <int C>
PixelGrid<C> crop(const PixelGrid<C>& img, int height, int width);

}  // namespace eainterp
