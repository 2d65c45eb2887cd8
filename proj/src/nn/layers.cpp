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

#include "eainterp/nn/layers.hpp"

#include <cmath>

namespace eainterp::nn {

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.var->value.size();
  return n;
}

void ParameterSet::zero_grad() const {
  for (const auto& p : params) p.var->grad = Tensor();
}

void ParameterSet::set_requires_grad(bool on) const {
  for (const auto& p : params) p.var->requires_grad = on;
}

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, float slope,
               std::mt19937_64& rng)
    : stride_(stride), pad_(pad) {
  const int fan_in = in_channels * kernel * kernel;
  const double gain = std::sqrt(2.0 / (1.0 + static_cast<double>(slope) * slope));
  const double bound = gain * std::sqrt(3.0 / fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor w(Shape{out_channels, in_channels, kernel, kernel});
  for (float& v : w.values()) v = static_cast<float>(dist(rng));
  weight_ = parameter(std::move(w));
  bias_ = parameter(Tensor(Shape{1, out_channels, 1, 1}));
}

void Conv2d::zero_init() {
  weight_->value.fill(0.0f);
  bias_->value.fill(0.0f);
}

void Conv2d::collect(const std::string& prefix, ParameterSet& out) {
  out.params.push_back({prefix + ".weight", weight_});
  out.params.push_back({prefix + ".bias", bias_});
}

BatchNorm2d::BatchNorm2d(int channels) {
  gamma_ = parameter(Tensor(Shape{1, channels, 1, 1}, 1.0f));
  beta_ = parameter(Tensor(Shape{1, channels, 1, 1}, 0.0f));
  state_.running_mean = Tensor(Shape{1, channels, 1, 1}, 0.0f);
  state_.running_var = Tensor(Shape{1, channels, 1, 1}, 1.0f);
}

void BatchNorm2d::collect(const std::string& prefix, ParameterSet& out) {
  out.params.push_back({prefix + ".gamma", gamma_});
  out.params.push_back({prefix + ".beta", beta_});
  out.buffers.push_back({prefix + ".running_mean", &state_.running_mean});
  out.buffers.push_back({prefix + ".running_var", &state_.running_var});
}

}  // namespace eainterp::nn
