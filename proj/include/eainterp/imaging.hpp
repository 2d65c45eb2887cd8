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

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "eainterp/image.hpp"

namespace eainterp {

// Raised for unreadable, unsupported or unwritable image files; the message
// names the path.
class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinFrameExtent = 32;

// Reads 8/16-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or binary PPM/PGM
// (P6/P5). Values are divided by the format maximum; gray is replicated to
// three channels and alpha dropped. Frames smaller than 32 px are rejected.
Frame load_image(const std::filesystem::path& path);

// 8-bit RGB PNG; byte = clamp(floor(v * 255 + 0.5), 0, 255).
void save_image(const Frame& frame, const std::filesystem::path& path);
// 8-bit grayscale PNG with the same quantization.
void save_image(const EdgeMap& edges, const std::filesystem::path& path);

// Luma with weights 0.299 / 0.587 / 0.114, row-major.
std::vector<double> luma(const Frame& frame);

struct CannyParams {
  // Thresholds on the raw Sobel gradient magnitude of the smoothed [0,1]
  // luma image; a unit step peaks near 2.2 at sigma 1.4.
  double low = 0.1;
  double high = 0.2;
  double sigma = 1.4;
};

// Binary Canny edges: luma, separable Gaussian (radius ceil(3 sigma),
// replicated border), Sobel, non-maximum suppression over four directions,
// hysteresis with 8-connectivity. Throws std::invalid_argument unless
// low < high and sigma > 0.
EdgeMap canny_edges(const Frame& frame, const CannyParams& params = {});

// Sobel magnitude of luma normalized by its image maximum; all zero for a
// constant image.
EdgeMap soft_edges(const Frame& frame);

inline std::uint8_t quantize_byte(float v) {
  const double s = static_cast<double>(v) * 255.0 + 0.5;
  if (!(s > 0.0)) return 0;
  if (s >= 255.0) return 255;
  return static_cast<std::uint8_t>(s);
}

}  // namespace eainterp
