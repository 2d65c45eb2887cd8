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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eainterp/image.hpp"

namespace eainterp {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The directory exists but is not laid out for the requested task mode.
class LayoutError : public DataError {
 public:
  using DataError::DataError;
};

struct TripletSample {
  std::string id;
  std::filesystem::path i0;
  std::filesystem::path gt;
  std::filesystem::path i1;
};

struct TripletScan {
  std::vector<TripletSample> samples;
  std::size_t skipped = 0;
};

// Sequence directories are the leaf directories below root (or the entries
// of a split file, one path relative to root per line), each holding
// im1.png, im2.png and im3.png. Ordered lexicographically by relative path.
TripletScan scan_triplets(const std::filesystem::path& root,
                          const std::optional<std::filesystem::path>& split_file = std::nullopt);

struct ClipSample {
  std::string id;
  // group frames; the first and last are the inputs.
  std::vector<std::filesystem::path> frames;
};

// Each direct subdirectory of root is a clip of image files ordered by name.
// Windows of group frames start every stride frames; short tails are dropped.
std::vector<ClipSample> scan_clips(const std::filesystem::path& root, int group = 9, int stride = 9,
                                   const std::optional<std::filesystem::path>& split_file = std::nullopt);

// Decoded training or evaluation sample: frames in temporal order, the
// first and last being the inputs, the rest targets at times t.
struct FrameSample {
  std::string id;
  std::vector<Frame> frames;
  std::vector<float> t;

  const Frame& first() const { return frames.front(); }
  const Frame& last() const { return frames.back(); }
  int targets() const { return static_cast<int>(t.size()); }
  const Frame& target(int i) const { return frames[static_cast<std::size_t>(i) + 1]; }
};

FrameSample load_sample(const TripletSample& s);
FrameSample load_sample(const ClipSample& s);

// Evenly spaced target times i / (n - 1) for n frames.
std::vector<float> uniform_times(int frames);

// Shared random crop (or a centre crop to the largest multiple of 32 when
// the frames are smaller than crop), then horizontal flip, vertical flip
// and temporal reversal, each with probability 0.5. Reversal maps t to 1 - t.
FrameSample augment(const FrameSample& sample, std::mt19937_64& rng, int crop = 256);

FrameSample reverse_time(const FrameSample& sample);
FrameSample flip_horizontal(const FrameSample& sample);
FrameSample flip_vertical(const FrameSample& sample);
FrameSample crop_sample(const FrameSample& sample, int y0, int x0, int height, int width);

// Soft-edged rectangles translating over a static gradient background. The
// displacement between the first and last frame is an even number of pixels
// per axis; values are quantized to 8 bits so PNG round trips are exact.
struct SyntheticConfig {
  int count = 4;
  int height = 64;
  int width = 64;
  int frames = 3;
  std::uint64_t seed = 0;
};

std::vector<FrameSample> synthetic_translating_rectangles(const SyntheticConfig& config);

enum class TaskMode { kSingleFrame, kMultiFrame };

std::string to_string(TaskMode mode);
TaskMode parse_task_mode(const std::string& name);

// Indexed access to samples, either held in memory or decoded from disk on
// first use. Small datasets keep decoded samples cached.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<FrameSample> samples);
  static Dataset from_triplets(const TripletScan& scan);
  static Dataset from_clips(const std::vector<ClipSample>& clips);
  // Triplet layout for single_frame, clip layout (windows of clip_group
  // frames) for multi_frame.
  static Dataset open(TaskMode mode, const std::filesystem::path& root,
                      const std::optional<std::filesystem::path>& split_file = std::nullopt,
                      int clip_group = 9);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  FrameSample get(std::size_t i) const;
  std::size_t skipped() const { return skipped_; }

  static constexpr std::size_t kCacheLimit = 256;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::filesystem::path>> paths_;
  mutable std::vector<std::optional<FrameSample>> cache_;
  std::size_t skipped_ = 0;
};

// Triplets as root/<id>/im1.png .. im3.png; longer samples as clip
// directories root/<id>/frame_0000.png ...
void write_samples(const std::vector<FrameSample>& samples, const std::filesystem::path& root);

}  // namespace eainterp
