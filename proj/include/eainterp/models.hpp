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
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eainterp/flow_algebra.hpp"
#include "eainterp/image.hpp"
#include "eainterp/nn/layers.hpp"

namespace eainterp {

// How edge maps enter flow estimation.
enum class EdgeMode { kPlain, kAugment, kConcat, kTwoStream };

std::string to_string(EdgeMode mode);
EdgeMode parse_edge_mode(const std::string& name);

struct FlowUNetConfig {
  EdgeMode input_mode = EdgeMode::kPlain;
  std::vector<int> encoder_channels{32, 64, 128, 256, 512, 512};
  float leaky_slope = 0.1f;

  // Channels fed to the frame network: 6 for plain/augment/two_stream,
  // 12 for concat.
  int input_channels() const;
  // Channels fed to the edge stream (two_stream only), else 0.
  int edge_stream_channels() const;
  void validate() const;
};

// Encoder of six double-conv blocks (7x7, 5x5, then 3x3 kernels; leaky
// activations; 2x2 max-pool after the first five) and a decoder of five
// blocks that upsample by 2 (nearest), convolve, concatenate the matching
// encoder features and convolve again. A final 3x3 conv maps to the output.
class UNet {
 public:
  UNet() = default;
  UNet(int in_channels, int out_channels, const std::vector<int>& widths, float slope,
       std::mt19937_64& rng);

  nn::Var operator()(const nn::Var& x) const;
  void collect(const std::string& prefix, nn::ParameterSet& out);
  nn::Conv2d& head() { return head_; }
  int in_channels() const { return in_channels_; }

 private:
  struct Block {
    nn::Conv2d a;
    nn::Conv2d b;
  };
  std::vector<Block> down_;
  std::vector<Block> up_;
  nn::Conv2d head_;
  float slope_ = 0.1f;
  int in_channels_ = 0;
};

// Frame-level inputs of one sample.
struct FlowInputs {
  const Frame& i0;
  const Frame& i1;
  const EdgeMap& e0;
  const EdgeMap& e1;
};

// Builds the network input tensors for a batch according to the mode:
// [n, input_channels, h, w] for the frame stream and, for two_stream,
// [n, 2, h, w] for the edge stream.
struct FlowNetworkInput {
  nn::Tensor frames;
  nn::Tensor edges;
};
FlowNetworkInput prepare_flow_input(EdgeMode mode, std::span<const FlowInputs> batch);

class FlowEstimator {
 public:
  FlowEstimator() = default;
  FlowEstimator(FlowUNetConfig config, std::uint64_t seed);

  const FlowUNetConfig& config() const { return config_; }

  // [n, 4, h, w]: channels 0-1 are F_01, 2-3 are F_10.
  nn::Var forward(const FlowNetworkInput& input) const;
  // Raw per-stream outputs for two_stream (frame, edge); edge is null otherwise.
  std::pair<nn::Var, nn::Var> forward_streams(const FlowNetworkInput& input) const;

  void collect(const std::string& prefix, nn::ParameterSet& out);
  UNet& frame_net() { return frame_net_; }

  // Test hook: in two_stream mode the edge stream output is replaced by the
  // frame stream output before merging.
  bool mirror_frame_stream = false;

 private:
  FlowUNetConfig config_;
  UNet frame_net_;
  std::optional<UNet> edge_net_;
};

FlowEstimator build_flow_estimator(const FlowUNetConfig& config, std::uint64_t seed);

// Single-sample inference; H and W must be divisible by 32.
std::pair<FlowMap, FlowMap> estimate_flow(const FlowEstimator& est, const Frame& i0,
                                          const Frame& i1, const EdgeMap& e0, const EdgeMap& e1);

inline constexpr int kRefinerInputChannels = 20;
inline constexpr int kRefinerOutputChannels = 5;

struct RefinerConfig {
  std::vector<int> channels{32, 64, 128, 256, 512, 512};
  float leaky_slope = 0.1f;
  // Predict residuals on top of the linear intermediate flows (else absolute).
  bool residual = true;
  // Zero the output convolution so training starts from the linear flows
  // and a 0.5 / 0.5 blend.
  bool zero_init_head = true;
};

struct AttentionPair {
  EdgeMap a0;
  EdgeMap a1;
};

struct RefinedFlows {
  nn::Var to0;
  nn::Var to1;
  // A0 as [n, 1, h, w]; A1 = 1 - A0.
  nn::Var a0;
  // Linear intermediate flows the residuals were added to.
  nn::Var linear_to0;
  nn::Var linear_to1;
};

// Batched linear intermediate flows; t holds one value per sample.
std::pair<nn::Var, nn::Var> intermediate_flows(const nn::Var& f01, const nn::Var& f10,
                                               std::span<const float> t, FlowForm form);

class Refiner {
 public:
  Refiner() = default;
  Refiner(RefinerConfig config, std::uint64_t seed);

  const RefinerConfig& config() const { return config_; }
  // Stacks [I0, I1, F01, F10, Ft0, Ft1, warp(I0, Ft0), warp(I1, Ft1)] and
  // runs the network.
  RefinedFlows forward(const nn::Var& i0, const nn::Var& i1, const nn::Var& f01,
                       const nn::Var& f10, std::span<const float> t, FlowForm form) const;
  void collect(const std::string& prefix, nn::ParameterSet& out);

 private:
  RefinerConfig config_;
  UNet net_;
};

struct RefineResult {
  FlowMap to0;
  FlowMap to1;
  AttentionPair attention;
};

RefineResult refine_and_attend(const Refiner& ref, const Frame& i0, const Frame& i1,
                               const FlowMap& f01, const FlowMap& f10, TimePoint t,
                               FlowForm form = FlowForm::kSymmetric);

// It = A0 * warp(I0, F_t0) + A1 * warp(I1, F_t1), clamped to [0, 1].
Frame synthesize(const Frame& i0, const Frame& i1, const FlowMap& to0, const FlowMap& to1,
                 const AttentionPair& attention);
// Batched form with A1 = 1 - A0; a0 is [n, 1, h, w].
nn::Var synthesize(const nn::Var& i0, const nn::Var& i1, const nn::Var& to0, const nn::Var& to1,
                   const nn::Var& a0);

enum class DiscriminatorKind { kFrame, kEdge };

struct DiscriminatorConfig {
  int base_channels = 64;
  float leaky_slope = 0.1f;
};

// Four stride-2 4x4 convolutions (base, 2x, 4x, 8x channels), each followed
// by batch normalization and a leaky activation, then a 1x1 projection and
// a sigmoid. The score is the spatial mean of the sigmoid map.
class Discriminator {
 public:
  static constexpr int kMinExtent = 64;

  Discriminator() = default;
  Discriminator(DiscriminatorKind kind, DiscriminatorConfig config, std::uint64_t seed);

  DiscriminatorKind kind() const { return kind_; }
  int input_channels() const { return kind_ == DiscriminatorKind::kFrame ? 3 : 1; }

  // Pre-sigmoid map [n, 1, h / 16, w / 16].
  nn::Var logits(const nn::Var& x, bool training);
  // Scores [n, 1, 1, 1] in (0, 1).
  nn::Var forward(const nn::Var& x, bool training);

  void collect(const std::string& prefix, nn::ParameterSet& out);
  std::uint64_t forward_calls() const { return forward_calls_; }

 private:
  DiscriminatorKind kind_ = DiscriminatorKind::kFrame;
  std::vector<nn::Conv2d> convs_;
  std::vector<nn::BatchNorm2d> norms_;
  nn::Conv2d project_;
  float slope_ = 0.1f;
  std::uint64_t forward_calls_ = 0;
};

// Single-image score in inference mode (running batch-norm statistics).
double discriminate(Discriminator& d, const Frame& image);
double discriminate(Discriminator& d, const EdgeMap& image);

}  // namespace eainterp
