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

#include "eainterp/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "eainterp/imaging.hpp"
#include "eainterp/nn/ops.hpp"

namespace eainterp {

namespace {

double mean_abs_diff(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(static_cast<double>(a[i]) - b[i]);
  return a.empty() ? 0.0 : acc / static_cast<double>(a.size());
}

}  // namespace

double synthesis_loss(const Frame& pred, const Frame& gt) {
  require_same_extent(pred, gt, "synthesis_loss");
  return mean_abs_diff(pred.values(), gt.values());
}

double flow_loss(const Frame& i0, const Frame& i1, const FlowMap& f01, const FlowMap& f10) {
  require_same_extent(i0, i1, "flow_loss");
  require_same_extent(i0, f01, "flow_loss");
  require_same_extent(i0, f10, "flow_loss");
  return mean_abs_diff(i0.values(), backward_warp(i1, f01).values()) +
         mean_abs_diff(i1.values(), backward_warp(i0, f10).values());
}

nn::Var synthesis_loss(const nn::Var& pred, const nn::Var& gt) { return nn::l1_mean(pred, gt); }

nn::Var flow_loss(const nn::Var& i0, const nn::Var& i1, const nn::Var& f01, const nn::Var& f10) {
  return nn::add(nn::l1_mean(i0, nn::warp(i1, f01)), nn::l1_mean(i1, nn::warp(i0, f10)));
}

AdversarialTerms adversarial_losses(Discriminator& d_frame, Discriminator& d_edge,
                                    const Frame& pred, const Frame& gt) {
  require_same_extent(pred, gt, "adversarial_losses");
  const double real_i = discriminate(d_frame, gt);
  const double fake_i = discriminate(d_frame, pred);
  const double real_e = discriminate(d_edge, soft_edges(gt));
  const double fake_e = discriminate(d_edge, soft_edges(pred));
  return {-fake_i - fake_e, real_i - fake_i, real_e - fake_e};
}

LossReport total_loss(const LossParts& parts, const LossWeights& weights) {
  if (weights.syn < 0.0 || weights.flow < 0.0 || weights.adv < 0.0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  LossReport r{parts, weights, 0.0};
  r.total = weights.syn * parts.l_syn + weights.flow * parts.l_flow;
  if (weights.adv != 0.0) r.total += weights.adv * (parts.l_adv_frame + parts.l_adv_edge);
  return r;
}

double mean_squared_error(const Frame& a, const Frame& b) {
  require_same_extent(a, b, "mean_squared_error");
  const auto av = a.values();
  const auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = static_cast<double>(av[i]) - bv[i];
    acc += d * d;
  }
  return av.empty() ? 0.0 : acc / static_cast<double>(av.size());
}

double psnr_from_mse(double mse) {
  if (mse < kPsnrCapMse) return kPsnrCapDb;
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const Frame& a, const Frame& b) { return psnr_from_mse(mean_squared_error(a, b)); }

double ssim(const Frame& a, const Frame& b) {
  require_same_extent(a, b, "ssim");
  constexpr int kWin = 11;
  constexpr int kRadius = kWin / 2;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const int h = a.height();
  const int w = a.width();
  if (h < kWin || w < kWin) throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  double taps[kWin];
  double norm = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kRadius;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    norm += taps[i];
  }
  for (double& t : taps) t /= norm;

  const int vh = h - kWin + 1;
  const int vw = w - kWin + 1;
  // Separable filtering of x, y, x^2, y^2, xy; horizontal pass keeps only
  // valid columns, vertical pass only valid rows.
  auto filter = [&](const std::vector<double>& img) {
    std::vector<double> tmp(static_cast<std::size_t>(h) * vw);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < vw; ++x) {
        double s = 0.0;
        for (int k = 0; k < kWin; ++k) s += taps[k] * img[static_cast<std::size_t>(y) * w + x + k];
        tmp[static_cast<std::size_t>(y) * vw + x] = s;
      }
    }
    std::vector<double> out(static_cast<std::size_t>(vh) * vw);
    for (int y = 0; y < vh; ++y) {
      for (int x = 0; x < vw; ++x) {
        double s = 0.0;
        for (int k = 0; k < kWin; ++k) s += taps[k] * tmp[static_cast<std::size_t>(y + k) * vw + x];
        out[static_cast<std::size_t>(y) * vw + x] = s;
      }
    }
    return out;
  };

  double total = 0.0;
  const std::size_t n = a.pixels();
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a.values()[i * 3 + c];
      y[i] = b.values()[i * 3 + c];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter(x), my = filter(y), mxx = filter(xx), myy = filter(yy), mxy = filter(xy);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double sx = mxx[i] - mx[i] * mx[i];
      const double sy = myy[i] - my[i] * my[i];
      const double sxy = mxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * sxy + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (sx + sy + kC2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / 3.0;
}

}  // namespace eainterp
