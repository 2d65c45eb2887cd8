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

#include "eainterp/tensor_bridge.hpp"

namespace eainterp {

nn::Tensor stack(std::span<const MultiChannelImage> images) {
  if (images.empty()) return {};
  const int h = images[0].height();
  const int w = images[0].width();
  const int c = images[0].channels();
  nn::Tensor t(nn::Shape{static_cast<int>(images.size()), c, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].channels() != c) throw std::invalid_argument("stack: channel count mismatch");
    require_same_extent(images[n], images[0], "stack");
    const auto v = images[n].values();
    for (int ch = 0; ch < c; ++ch) {
      float* dst = t.plane(static_cast<int>(n), ch);
      for (std::size_t i = 0; i < plane; ++i) dst[i] = v[i * c + ch];
    }
  }
  return t;
}

}  // namespace eainterp
