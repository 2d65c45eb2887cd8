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

#include "eainterp/image.hpp"
#include "eainterp/models.hpp"
#include "eainterp/nn/autograd.hpp"

namespace eainterp {

// Mean absolute difference over all pixels and channels.
double synthesis_loss(const Frame& pred, const Frame& gt);
// mean|I0 - warp(I1, F01)| + mean|I1 - warp(I0, F10)|
double flow_loss(const Frame& i0, const Frame& i1, const FlowMap& f01, const FlowMap& f10);

nn::Var synthesis_loss(const nn::Var& pred, const nn::Var& gt);
nn::Var flow_loss(const nn::Var& i0, const nn::Var& i1, const nn::Var& f01, const nn::Var& f10);

// kDifference trains the discriminators to maximize D(real) - D(fake) and the
// generator to minimize -D(fake). kCrossEntropy is the usual binary
// cross-entropy GAN objective on the same sigmoid scores.
enum class AdversarialMode { kDifference, kCrossEntropy };

struct AdversarialTerms {
  // -D_I(pred) - D_E(soft_edges(pred)) in difference mode.
  double gen_term = 0.0;
  // D_I(gt) - D_I(pred)
  double disc_frame_term = 0.0;
  // D_E(soft_edges(gt)) - D_E(soft_edges(pred))
  double disc_edge_term = 0.0;
};

// Scores in inference mode for one image pair.
AdversarialTerms adversarial_losses(Discriminator& d_frame, Discriminator& d_edge,
                                    const Frame& pred, const Frame& gt);

struct LossWeights {
  double syn = 1.0;
  double flow = 1.0;
  double adv = 1.0;
};

struct LossParts {
  double l_syn = 0.0;
  double l_flow = 0.0;
  double l_adv_frame = 0.0;
  double l_adv_edge = 0.0;
};

struct LossReport {
  LossParts parts;
  LossWeights weights;
  double total = 0.0;
};

// total = w_syn l_syn + w_flow l_flow + w_adv (l_adv_frame + l_adv_edge).
// Negative weights throw std::invalid_argument.
LossReport total_loss(const LossParts& parts, const LossWeights& weights = {});

inline constexpr double kPsnrCapDb = 100.0;
inline constexpr double kPsnrCapMse = 1e-10;

double mean_squared_error(const Frame& a, const Frame& b);
// 10 log10(1 / mse), or the 100 dB cap when mse < 1e-10.
double psnr_from_mse(double mse);
double psnr(const Frame& a, const Frame& b);

// Gaussian-window SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03, L 1) per channel,
// averaged over the positions where the window lies inside the image and
// then over channels. Images must be at least 11x11.
double ssim(const Frame& a, const Frame& b);

}  // namespace eainterp
