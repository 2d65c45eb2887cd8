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
#include <vector>

// Planar luma and Sobel-based soft edge kernels, templated so gradient
// checks can run them in double precision.

namespace eainterp::kernels {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

// rgb: three planes of h * w.
template <class T>
void luma(const T* rgb, int h, int w, T* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < plane; ++i) {
    out[i] = T(kLumaR) * rgb[i] + T(kLumaG) * rgb[plane + i] + T(kLumaB) * rgb[2 * plane + i];
  }
}

// 3x3 Sobel with replicated borders. gx grows to the right, gy downwards.
template <class T>
void sobel(const T* img, int h, int w, T* gx, T* gy) {
  auto at = [&](int y, int x) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return img[static_cast<std::size_t>(y) * w + x];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = (at(y - 1, x + 1) + T(2) * at(y, x + 1) + at(y + 1, x + 1)) -
              (at(y - 1, x - 1) + T(2) * at(y, x - 1) + at(y + 1, x - 1));
      gy[i] = (at(y + 1, x - 1) + T(2) * at(y + 1, x) + at(y + 1, x + 1)) -
              (at(y - 1, x - 1) + T(2) * at(y - 1, x) + at(y - 1, x + 1));
    }
  }
}

// Adjoint of sobel(): accumulates into grad_img.
template <class T>
void sobel_adjoint(const T* grad_gx, const T* grad_gy, int h, int w, T* grad_img) {
  auto add = [&](int y, int x, T v) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    grad_img[static_cast<std::size_t>(y) * w + x] += v;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const T a = grad_gx[i];
      add(y - 1, x + 1, a);
      add(y, x + 1, T(2) * a);
      add(y + 1, x + 1, a);
      add(y - 1, x - 1, -a);
      add(y, x - 1, T(-2) * a);
      add(y + 1, x - 1, -a);
      const T b = grad_gy[i];
      add(y + 1, x - 1, b);
      add(y + 1, x, T(2) * b);
      add(y + 1, x + 1, b);
      add(y - 1, x - 1, -b);
      add(y - 1, x, T(-2) * b);
      add(y - 1, x + 1, -b);
    }
  }
}

// Sobel magnitude of the luma image, divided by its maximum (all zero for a
// constant image). Returns the flat index of the first maximum, or -1.
template <class T>
long soft_edges_forward(const T* rgb, int h, int w, T* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<T> y(plane), gx(plane), gy(plane);
  luma(rgb, h, w, y.data());
  sobel(y.data(), h, w, gx.data(), gy.data());
  long arg = -1;
  T peak = 0;
  for (std::size_t i = 0; i < plane; ++i) {
    out[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    if (out[i] > peak) {
      peak = out[i];
      arg = static_cast<long>(i);
    }
  }
  if (arg < 0) {
    std::fill(out, out + plane, T(0));
    return -1;
  }
  const T inv = T(1) / peak;
  for (std::size_t i = 0; i < plane; ++i) out[i] *= inv;
  return arg;
}

// Accumulates d(loss)/d(rgb) given d(loss)/d(out).
template <class T>
void soft_edges_backward(const T* rgb, int h, int w, const T* grad_out, T* grad_rgb) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<T> y(plane), gx(plane), gy(plane), mag(plane);
  luma(rgb, h, w, y.data());
  sobel(y.data(), h, w, gx.data(), gy.data());
  long arg = -1;
  T peak = 0;
  for (std::size_t i = 0; i < plane; ++i) {
    mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    if (mag[i] > peak) {
      peak = mag[i];
      arg = static_cast<long>(i);
    }
  }
  if (arg < 0) return;

  // out_i = mag_i / peak, and peak is mag at arg.
  std::vector<T> grad_mag(plane);
  T cross = 0;
  for (std::size_t i = 0; i < plane; ++i) {
    grad_mag[i] = grad_out[i] / peak;
    cross += grad_out[i] * mag[i];
  }
  grad_mag[static_cast<std::size_t>(arg)] -= cross / (peak * peak);

  std::vector<T> ggx(plane), ggy(plane), gy_img(plane, T(0));
  for (std::size_t i = 0; i < plane; ++i) {
    if (mag[i] > T(0)) {
      ggx[i] = grad_mag[i] * gx[i] / mag[i];
      ggy[i] = grad_mag[i] * gy[i] / mag[i];
    }
  }
  sobel_adjoint(ggx.data(), ggy.data(), h, w, gy_img.data());
  for (std::size_t i = 0; i < plane; ++i) {
    grad_rgb[i] += T(kLumaR) * gy_img[i];
    grad_rgb[plane + i] += T(kLumaG) * gy_img[i];
    grad_rgb[2 * plane + i] += T(kLumaB) * gy_img[i];
  }
}

}  // namespace eainterp::kernels
