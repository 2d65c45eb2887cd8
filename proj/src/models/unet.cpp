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

#include <stdexcept>

#include "eainterp/models.hpp"

namespace eainterp {

namespace {

int encoder_kernel(int block) { return block == 0 ? 7 : (block == 1 ? 5 : 3); }

}  // namespace

UNet::UNet(int in_channels, int out_channels, const std::vector<int>& widths, float slope,
           std::mt19937_64& rng)
    : slope_(slope), in_channels_(in_channels) {
  if (widths.size() != 6) throw std::invalid_argument("U-Net needs exactly 6 encoder widths");
  int prev = in_channels;
  for (int i = 0; i < 6; ++i) {
    const int k = encoder_kernel(i);
    Block b{nn::Conv2d(prev, widths[i], k, 1, k / 2, slope, rng),
            nn::Conv2d(widths[i], widths[i], k, 1, k / 2, slope, rng)};
    down_.push_back(std::move(b));
    prev = widths[i];
  }
  // up_[j] restores the resolution of encoder block j.
  up_.resize(5);
  for (int j = 4; j >= 0; --j) {
    up_[j] = Block{nn::Conv2d(prev, widths[j], 3, 1, 1, slope, rng),
                   nn::Conv2d(2 * widths[j], widths[j], 3, 1, 1, slope, rng)};
    prev = widths[j];
  }
  head_ = nn::Conv2d(prev, out_channels, 3, 1, 1, 1.0f, rng);
}

nn::Var UNet::operator()(const nn::Var& x) const {
  const auto& s = x->value.shape();
  if (s.c != in_channels_) {
    throw std::invalid_argument("U-Net expects " + std::to_string(in_channels_) +
                                " input channels, got " + std::to_string(s.c));
  }
  if (s.h % 32 != 0 || s.w % 32 != 0 || s.h == 0 || s.w == 0) {
    throw std::invalid_argument("U-Net input " + std::to_string(s.h) + "x" + std::to_string(s.w) +
                                " is not divisible by 32");
  }
  std::vector<nn::Var> skips;
  nn::Var h = x;
  for (std::size_t i = 0; i < down_.size(); ++i) {
    h = nn::leaky_relu(down_[i].a(h), slope_);
    h = nn::leaky_relu(down_[i].b(h), slope_);
    if (i + 1 < down_.size()) {
      skips.push_back(h);
      h = nn::max_pool2(h);
    }
  }
  for (int j = 4; j >= 0; --j) {
    h = nn::upsample_nearest2(h);
    h = nn::leaky_relu(up_[j].a(h), slope_);
    const nn::Var parts[] = {h, skips[j]};
    h = nn::leaky_relu(up_[j].b(nn::concat_channels(parts)), slope_);
  }
  return head_(h);
}

void UNet::collect(const std::string& prefix, nn::ParameterSet& out) {
  for (std::size_t i = 0; i < down_.size(); ++i) {
    down_[i].a.collect(prefix + ".down" + std::to_string(i) + ".a", out);
    down_[i].b.collect(prefix + ".down" + std::to_string(i) + ".b", out);
  }
  for (int j = 4; j >= 0; --j) {
    up_[j].a.collect(prefix + ".up" + std::to_string(j) + ".a", out);
    up_[j].b.collect(prefix + ".up" + std::to_string(j) + ".b", out);
  }
  head_.collect(prefix + ".head", out);
}

}  // namespace eainterp
