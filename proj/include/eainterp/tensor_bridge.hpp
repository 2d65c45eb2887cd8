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

#include "eainterp/image.hpp"
#include "eainterp/nn/tensor.hpp"

// Conversions between interleaved images and NCHW batches.

namespace eainterp {

template <int C>
nn::Tensor stack(std::span<const PixelGrid<C>> images) {
  if (images.empty()) return {};
  const int h = images[0].height();
  const int w = images[0].width();
  nn::Tensor t(nn::Shape{static_cast<int>(images.size()), C, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t n = 0; n < images.size(); ++n) {
    require_same_extent(images[n], images[0], "stack");
    const auto v = images[n].values();
    for (int c = 0; c < C; ++c) {
      float* dst = t.plane(static_cast<int>(n), c);
      for (std::size_t i = 0; i < plane; ++i) dst[i] = v[i * C + c];
    }
  }
  return t;
}

nn::Tensor stack(std::span<const MultiChannelImage> images);

// Extracts channels [channel, channel + C) of sample n.
template <int C>
PixelGrid<C> unstack(const nn::Tensor& t, int n, int channel = 0) {
  const auto& s = t.shape();
  PixelGrid<C> img(s.h, s.w);
  const std::size_t plane = s.plane();
  auto v = img.values();
  for (int c = 0; c < C; ++c) {
    const float* src = t.plane(n, channel + c);
    for (std::size_t i = 0; i < plane; ++i) v[i * C + c] = src[i];
  }
  return img;
}

}  // namespace eainterp
