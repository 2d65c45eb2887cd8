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

#include <span>
#include <vector>

#include "eainterp/nn/autograd.hpp"

// Differentiable NCHW operations. Shapes are checked and violations throw
// std::invalid_argument.

namespace eainterp::nn {

// weight: [out, in, k, k]; bias: [1, out, 1, 1] or null. Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
Var leaky_relu(const Var& x, float slope);
Var max_pool2(const Var& x);
Var upsample_nearest2(const Var& x);
Var sigmoid(const Var& x);

Var concat_channels(std::span<const Var> parts);
Var slice_channels(const Var& x, int begin, int count);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, float s);
Var add_scalar(const Var& x, float s);
// x: [n, c, h, w], m: [n, 1, h, w]; m is broadcast over channels.
Var mul_broadcast(const Var& x, const Var& m);
// Multiplies sample i by factors[i].
Var scale_per_sample(const Var& x, std::span<const float> factors);
// Gradient passes only where lo < x < hi.
Var clamp(const Var& x, float lo, float hi);
Var log(const Var& x);

// Mean over every element, returned as [1, 1, 1, 1].
Var mean(const Var& x);
// Mean of sample i's elements, returned as [n, 1, 1, 1].
Var mean_per_sample(const Var& x);
Var l1_mean(const Var& a, const Var& b);

struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  float momentum = 0.1f;
  float eps = 1e-5f;
};
// gamma, beta: [1, c, 1, 1]. Training mode normalizes with batch statistics
// and updates the running estimates.
Var batch_norm(const Var& x, const Var& gamma, const Var& beta, BatchNormState& state,
               bool training);

// src: [n, c, h, w], flow: [n, 2, h, w].
Var warp(const Var& src, const Var& flow);
// rgb: [n, 3, h, w] -> [n, 1, h, w], per-sample max normalization.
Var soft_edges(const Var& rgb);

}  // namespace eainterp::nn
