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

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "eainterp/edge_kernels.hpp"
#include "eainterp/imaging.hpp"

namespace eainterp {
namespace {

// tan(22.5 deg) and tan(67.5 deg) bound the four direction sectors.
constexpr double kTan22 = 0.41421356237309503;
constexpr double kTan67 = 2.4142135623730949;

std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable blur, horizontal pass first, replicated borders.
std::vector<double> gaussian_blur(const std::vector<double>& img, int h, int w, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  std::vector<double> tmp(img.size()), out(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * img[y * w + std::clamp(x + k, 0, w - 1)];
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp[std::clamp(y + k, 0, h - 1) * w + x];
      out[y * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

std::vector<double> luma(const Frame& frame) {
  std::vector<double> out(frame.pixels());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      out[static_cast<std::size_t>(y) * frame.width() + x] =
          kernels::kLumaR * frame.at(y, x, 0) + kernels::kLumaG * frame.at(y, x, 1) +
          kernels::kLumaB * frame.at(y, x, 2);
    }
  }
  return out;
}

EdgeMap canny_edges(const Frame& frame, const CannyParams& params) {
  if (!(params.low < params.high)) {
    throw std::invalid_argument("canny: low threshold must be below high threshold");
  }
  if (!(params.sigma > 0.0)) throw std::invalid_argument("canny: sigma must be positive");
  const int h = frame.height();
  const int w = frame.width();
  EdgeMap edges(h, w);
  if (h == 0 || w == 0) return edges;

  const auto smooth = gaussian_blur(luma(frame), h, w, params.sigma);
  std::vector<double> gx(smooth.size()), gy(smooth.size()), mag(smooth.size());
  kernels::sobel(smooth.data(), h, w, gx.data(), gy.data());
  // Snapped to a 1e-9 grid so responses that are equal in exact arithmetic
  // compare equal whatever order the blur summed in.
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::round(std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]) * 1e9) * 1e-9;
  }

  auto mag_at = [&](int y, int x) {
    return mag[std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1)];
  };

  // 0 none, 1 weak, 2 strong
  std::vector<unsigned char> cls(mag.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      const double m = mag[i];
      if (m < params.low) continue;
      const double ax = std::fabs(gx[i]);
      const double ay = std::fabs(gy[i]);
      int dx, dy;
      if (ay <= kTan22 * ax) {
        dx = 1, dy = 0;
      } else if (ay >= kTan67 * ax) {
        dx = 0, dy = 1;
      } else if ((gx[i] > 0) == (gy[i] > 0)) {
        dx = 1, dy = 1;
      } else {
        dx = 1, dy = -1;
      }
      // Ties resolve toward the forward neighbour so plateaus stay one pixel wide.
      if (m >= mag_at(y - dy, x - dx) && m > mag_at(y + dy, x + dx)) {
        cls[i] = m >= params.high ? 2 : 1;
      }
    }
  }

  std::deque<int> queue;
  for (int i = 0; i < h * w; ++i) {
    if (cls[i] == 2) {
      edges.values()[i] = 1.0f;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const int y = i / w;
    const int x = i % w;
    for (int ny = std::max(0, y - 1); ny <= std::min(h - 1, y + 1); ++ny) {
      for (int nx = std::max(0, x - 1); nx <= std::min(w - 1, x + 1); ++nx) {
        const int j = ny * w + nx;
        if (cls[j] == 1 && edges.values()[j] == 0.0f) {
          edges.values()[j] = 1.0f;
          queue.push_back(j);
        }
      }
    }
  }
  return edges;
}

EdgeMap soft_edges(const Frame& frame) {
  const int h = frame.height();
  const int w = frame.width();
  const std::size_t plane = frame.pixels();
  std::vector<float> planar(3 * plane);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) planar[c * plane + i] = frame.values()[i * 3 + c];
  }
  EdgeMap out(h, w);
  kernels::soft_edges_forward(planar.data(), h, w, out.values().data());
  return out;
}

}  // namespace eainterp
