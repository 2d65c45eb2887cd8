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

#include <vector>

#include "eainterp/image.hpp"

namespace eainterp {

// Channel-major copy of an interleaved grid, the layout the kernels use.
template <int C, class T = float>
std::vector<T> to_planar(const PixelGrid<C>& img) {
  const std::size_t plane = img.pixels();
  std::vector<T> out(plane * C);
  const auto v = img.values();
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < C; ++c) out[c * plane + i] = static_cast<T>(v[i * C + c]);
  }
  return out;
}

template <int C, class T>
PixelGrid<C> from_planar(const T* planar, int height, int width) {
  PixelGrid<C> img(height, width);
  const std::size_t plane = img.pixels();
  auto v = img.values();
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < C; ++c) v[i * C + c] = static_cast<float>(planar[c * plane + i]);
  }
  return img;
}

}  // namespace eainterp
