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
#include <numbers>
#include <random>
#include <vector>

#include "eainterp/image.hpp"

namespace eainterp::testing {

// Brute-force Canny written without sharing code with the library: full 2D
// Gaussian window, explicit Sobel stencils, atan2 sectors and fixed-point
// hysteresis.
inline EdgeMap reference_canny(const Frame& f, double low, double high, double sigma) {
  const int h = f.height(), w = f.width();
  auto idx = [&](int y, int x) { return std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1); };
  std::vector<double> gray(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      gray[y * w + x] = 0.299 * f.at(y, x, 0) + 0.587 * f.at(y, x, 1) + 0.114 * f.at(y, x, 2);

  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel;
  double ksum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      kernel.push_back(std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)));
      ksum += kernel.back();
    }
  std::vector<double> blur(gray.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      int k = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) acc += kernel[k++] * gray[idx(y + dy, x + dx)];
      blur[y * w + x] = acc / ksum;
    }

  static constexpr int kSx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static constexpr int kSy[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::vector<double> mag(gray.size());
  std::vector<int> dir_x(gray.size()), dir_y(gray.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double gx = 0.0, gy = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
          gx += kSx[j][i] * blur[idx(y + j - 1, x + i - 1)];
          gy += kSy[j][i] * blur[idx(y + j - 1, x + i - 1)];
        }
      mag[y * w + x] = std::round(std::hypot(gx, gy) * 1e9) * 1e-9;
      double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (deg < 0) deg += 180.0;
      int dx = 1, dy = 0;
      if (deg >= 22.5 && deg < 67.5) dx = 1, dy = 1;
      else if (deg >= 67.5 && deg < 112.5) dx = 0, dy = 1;
      else if (deg >= 112.5 && deg < 157.5) dx = 1, dy = -1;
      dir_x[y * w + x] = dx;
      dir_y[y * w + x] = dy;
    }

  std::vector<int> state(gray.size(), 0);  // 1 weak, 2 strong
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      if (mag[i] < low) continue;
      const double behind = mag[idx(y - dir_y[i], x - dir_x[i])];
      const double ahead = mag[idx(y + dir_y[i], x + dir_x[i])];
      if (mag[i] >= behind && mag[i] > ahead) state[i] = mag[i] >= high ? 2 : 1;
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (state[y * w + x] != 1) continue;
        for (int ny = y - 1; ny <= y + 1; ++ny)
          for (int nx = x - 1; nx <= x + 1; ++nx)
            if (ny >= 0 && nx >= 0 && ny < h && nx < w && state[ny * w + nx] == 2) {
              state[y * w + x] = 2;
              changed = true;
            }
      }
  }
  EdgeMap out(h, w);
  for (std::size_t i = 0; i < state.size(); ++i) out.values()[i] = state[i] == 2 ? 1.0f : 0.0f;
  return out;
}

// Piecewise-constant test card: random rectangles and discs over a flat
// background. Levels are dark or bright so most boundaries clear the default
// thresholds.
inline Frame piecewise_constant_image(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 0.15f), tint(-0.05f, 0.05f);
  auto shade = [&](float out[3]) {
    const float base = rng() % 2 ? 0.9f - u(rng) : 0.1f + u(rng);
    for (int c = 0; c < 3; ++c) out[c] = base + tint(rng);
  };
  std::uniform_int_distribution<int> ys(0, h - 1), xs(0, w - 1), rad(3, std::max(4, std::min(h, w) / 4));
  Frame f(h, w);
  float bg[3];
  shade(bg);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) f.at(y, x, c) = bg[c];
  const int shapes = 3 + static_cast<int>(rng() % 4);
  for (int s = 0; s < shapes; ++s) {
    float col[3];
    shade(col);
    const int cy = ys(rng), cx = xs(rng), r = rad(rng);
    const bool disc = rng() % 2;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const bool inside = disc ? (y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r
                                 : std::abs(y - cy) <= r && std::abs(x - cx) <= r / 2 + 1;
        if (inside)
          for (int c = 0; c < 3; ++c) f.at(y, x, c) = col[c];
      }
  }
  return f;
}

}  // namespace eainterp::testing
