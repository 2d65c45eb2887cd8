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

#include <algorithm>
#include <cmath>
#include <cstddef>

// Planar bilinear backward warping. Images are channel-major planes of
// h * w values; flows are two planes (u then v) in pixel units. The output
// at (x, y) samples the source at (x + u, y + v), clamped to the border.

namespace eainterp::kernels {

namespace detail {

template <class T>
struct BilinearTap {
  int x0, x1, y0, y1;
  T ax, ay;
  bool clamped_x, clamped_y;
};

template <class T>
inline BilinearTap<T> bilinear_tap(T sx, T sy, int h, int w) {
  BilinearTap<T> t{};
  const T max_x = static_cast<T>(w - 1);
  const T max_y = static_cast<T>(h - 1);
  t.clamped_x = !(sx >= T(0) && sx <= max_x);
  t.clamped_y = !(sy >= T(0) && sy <= max_y);
  sx = std::clamp(sx, T(0), max_x);
  sy = std::clamp(sy, T(0), max_y);
  const T fx = std::floor(sx);
  const T fy = std::floor(sy);
  t.x0 = static_cast<int>(fx);
  t.y0 = static_cast<int>(fy);
  t.x1 = std::min(t.x0 + 1, w - 1);
  t.y1 = std::min(t.y0 + 1, h - 1);
  t.ax = sx - fx;
  t.ay = sy - fy;
  return t;
}

}  // namespace detail

template <class T>
void warp_forward(const T* src, int channels, int h, int w, const T* flow, T* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const T* fu = flow;
  const T* fv = flow + plane;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const auto tap = detail::bilinear_tap<T>(x + fu[i], y + fv[i], h, w);
      const T w00 = (T(1) - tap.ax) * (T(1) - tap.ay);
      const T w01 = tap.ax * (T(1) - tap.ay);
      const T w10 = (T(1) - tap.ax) * tap.ay;
      const T w11 = tap.ax * tap.ay;
      const std::size_t i00 = static_cast<std::size_t>(tap.y0) * w + tap.x0;
      const std::size_t i01 = static_cast<std::size_t>(tap.y0) * w + tap.x1;
      const std::size_t i10 = static_cast<std::size_t>(tap.y1) * w + tap.x0;
      const std::size_t i11 = static_cast<std::size_t>(tap.y1) * w + tap.x1;
      for (int c = 0; c < channels; ++c) {
        const T* s = src + c * plane;
        out[c * plane + i] = w00 * s[i00] + w01 * s[i01] + w10 * s[i10] + w11 * s[i11];
      }
    }
  }
}

// Accumulates into grad_src / grad_flow; either may be null. Sampling
// coordinates clamped to the border receive zero flow gradient.
template <class T>
void warp_backward(const T* src, int channels, int h, int w, const T* flow,
                   const T* grad_out, T* grad_src, T* grad_flow) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const T* fu = flow;
  const T* fv = flow + plane;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const auto tap = detail::bilinear_tap<T>(x + fu[i], y + fv[i], h, w);
      const T w00 = (T(1) - tap.ax) * (T(1) - tap.ay);
      const T w01 = tap.ax * (T(1) - tap.ay);
      const T w10 = (T(1) - tap.ax) * tap.ay;
      const T w11 = tap.ax * tap.ay;
      const std::size_t i00 = static_cast<std::size_t>(tap.y0) * w + tap.x0;
      const std::size_t i01 = static_cast<std::size_t>(tap.y0) * w + tap.x1;
      const std::size_t i10 = static_cast<std::size_t>(tap.y1) * w + tap.x0;
      const std::size_t i11 = static_cast<std::size_t>(tap.y1) * w + tap.x1;
      T du = 0;
      T dv = 0;
      for (int c = 0; c < channels; ++c) {
        const T g = grad_out[c * plane + i];
        const T* s = src + c * plane;
        if (grad_src) {
          T* gs = grad_src + c * plane;
          gs[i00] += w00 * g;
          gs[i01] += w01 * g;
          gs[i10] += w10 * g;
          gs[i11] += w11 * g;
        }
        du += g * ((T(1) - tap.ay) * (s[i01] - s[i00]) + tap.ay * (s[i11] - s[i10]));
        dv += g * ((T(1) - tap.ax) * (s[i10] - s[i00]) + tap.ax * (s[i11] - s[i01]));
      }
      if (grad_flow) {
        if (!tap.clamped_x) grad_flow[i] += du;
        if (!tap.clamped_y) grad_flow[plane + i] += dv;
      }
    }
  }
}

}  // namespace eainterp::kernels
