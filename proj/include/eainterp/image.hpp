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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eainterp {

// Row-major, channel-interleaved grid of floats with a compile-time channel
// count. Frame, EdgeMap and FlowMap are the three instantiations in use.
template <int Channels>
class PixelGrid {
 public:
  static constexpr int kChannels = Channels;

  PixelGrid() = default;
  PixelGrid(int height, int width, float fill = 0.0f)
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(height) * width * Channels, fill) {
    if (height < 0 || width < 0) throw std::invalid_argument("negative image extent");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }
  float at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  bool operator==(const PixelGrid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

// H x W x 3 color image, values in [0, 1].
using Frame = PixelGrid<3>;
// H x W single channel map in [0, 1].
using EdgeMap = PixelGrid<1>;
// H x W x 2 displacement field (u right, v down) in pixels.
using FlowMap = PixelGrid<2>;

// Image with a run-time channel count, produced by the edge fusion inputs.
class MultiChannelImage {
 public:
  MultiChannelImage() = default;
  MultiChannelImage(int height, int width, int channels)
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * width * channels, 0.0f) {}

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  float& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::span<const float> values() const { return data_; }

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

template <class A, class B>
bool same_extent(const A& a, const B& b) {
  return a.height() == b.height() && a.width() == b.width();
}

template <class A, class B>
void require_same_extent(const A& a, const B& b, const char* what) {
  if (!same_extent(a, b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                                " vs " + std::to_string(b.height()) + "x" +
                                std::to_string(b.width()));
  }
}

}  // namespace eainterp
