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

#include "eainterp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eainterp/imaging.hpp"

namespace fs = std::filesystem;

namespace eainterp {

namespace {

std::string relative_id(const fs::path& p, const fs::path& root) {
  return p.lexically_relative(root).generic_string();
}

std::vector<fs::path> read_split(const fs::path& root, const fs::path& split) {
  std::ifstream in(split);
  if (!in) throw DataError("cannot read split file " + split.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(root / line.substr(first));
  }
  return out;
}

void require_root(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("dataset root " + root.string() + " does not exist");
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

// Uniform integer in [0, n) from raw engine output.
int draw(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

}  // namespace

TripletScan scan_triplets(const fs::path& root, const std::optional<fs::path>& split_file) {
  require_root(root);
  std::vector<fs::path> dirs;
  if (split_file) {
    dirs = read_split(root, *split_file);
  } else {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_directory()) continue;
      bool leaf = true;
      for (const auto& c : fs::directory_iterator(e.path())) {
        if (c.is_directory()) {
          leaf = false;
          break;
        }
      }
      if (leaf) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end(), [&](const fs::path& a, const fs::path& b) {
    return relative_id(a, root) < relative_id(b, root);
  });
  TripletScan scan;
  for (const auto& d : dirs) {
    TripletSample s{relative_id(d, root), d / "im1.png", d / "im2.png", d / "im3.png"};
    if (fs::is_regular_file(s.i0) && fs::is_regular_file(s.gt) && fs::is_regular_file(s.i1)) {
      scan.samples.push_back(std::move(s));
    } else {
      ++scan.skipped;
    }
  }
  if (scan.samples.empty()) throw DataError("zero usable samples under " + root.string());
  return scan;
}

std::vector<ClipSample> scan_clips(const fs::path& root, int group, int stride,
                                   const std::optional<fs::path>& split_file) {
  require_root(root);
  if (group < 3) throw std::invalid_argument("clip group must be at least 3 frames");
  if (stride < 1) throw std::invalid_argument("clip stride must be positive");
  std::vector<fs::path> clips;
  if (split_file) {
    clips = read_split(root, *split_file);
  } else {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) clips.push_back(e.path());
    }
  }
  std::sort(clips.begin(), clips.end(), [&](const fs::path& a, const fs::path& b) {
    return relative_id(a, root) < relative_id(b, root);
  });
  std::vector<ClipSample> out;
  for (const auto& clip : clips) {
    if (!fs::is_directory(clip)) continue;
    std::vector<fs::path> frames;
    for (const auto& e : fs::directory_iterator(clip)) {
      if (e.is_regular_file() && is_image_file(e.path())) frames.push_back(e.path());
    }
    std::sort(frames.begin(), frames.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    const std::string id = relative_id(clip, root);
    for (std::size_t start = 0; start + static_cast<std::size_t>(group) <= frames.size();
         start += static_cast<std::size_t>(stride)) {
      ClipSample s;
      s.id = id + "@" + std::to_string(start);
      s.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(start),
                      frames.begin() + static_cast<std::ptrdiff_t>(start + group));
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<float> uniform_times(int frames) {
  std::vector<float> t;
  for (int i = 1; i + 1 < frames; ++i) t.push_back(static_cast<float>(static_cast<double>(i) / (frames - 1)));
  return t;
}

namespace {

FrameSample load_frames(std::string id, const std::vector<fs::path>& paths) {
  FrameSample s;
  s.id = std::move(id);
  for (const auto& p : paths) {
    s.frames.push_back(load_image(p));
    if (!same_extent(s.frames.back(), s.frames.front())) {
      throw DataError("frame " + p.string() + " differs in size from the rest of sample " + s.id);
    }
  }
  s.t = uniform_times(static_cast<int>(paths.size()));
  return s;
}

}  // namespace

FrameSample load_sample(const TripletSample& s) { return load_frames(s.id, {s.i0, s.gt, s.i1}); }
FrameSample load_sample(const ClipSample& s) { return load_frames(s.id, s.frames); }

FrameSample reverse_time(const FrameSample& sample) {
  FrameSample out = sample;
  std::reverse(out.frames.begin(), out.frames.end());
  std::reverse(out.t.begin(), out.t.end());
  for (float& t : out.t) t = static_cast<float>(1.0 - static_cast<double>(t));
  return out;
}

FrameSample flip_horizontal(const FrameSample& sample) {
  FrameSample out = sample;
  for (auto& f : out.frames) {
    const Frame src = f;
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x)
        for (int c = 0; c < 3; ++c) f.at(y, x, c) = src.at(y, f.width() - 1 - x, c);
  }
  return out;
}

FrameSample flip_vertical(const FrameSample& sample) {
  FrameSample out = sample;
  for (auto& f : out.frames) {
    const Frame src = f;
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x)
        for (int c = 0; c < 3; ++c) f.at(y, x, c) = src.at(f.height() - 1 - y, x, c);
  }
  return out;
}

FrameSample crop_sample(const FrameSample& sample, int y0, int x0, int height, int width) {
  FrameSample out;
  out.id = sample.id;
  out.t = sample.t;
  for (const auto& f : sample.frames) {
    if (y0 < 0 || x0 < 0 || y0 + height > f.height() || x0 + width > f.width()) {
      throw std::invalid_argument("crop window outside the frame");
    }
    Frame c(height, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int ch = 0; ch < 3; ++ch) c.at(y, x, ch) = f.at(y0 + y, x0 + x, ch);
    out.frames.push_back(std::move(c));
  }
  return out;
}

FrameSample augment(const FrameSample& sample, std::mt19937_64& rng, int crop) {
  const int h = sample.first().height();
  const int w = sample.first().width();
  FrameSample out;
  if (h >= crop && w >= crop) {
    const int y0 = draw(rng, h - crop + 1);
    const int x0 = draw(rng, w - crop + 1);
    out = crop_sample(sample, y0, x0, crop, crop);
  } else {
    const int ch = h / 32 * 32;
    const int cw = w / 32 * 32;
    if (ch == 0 || cw == 0) throw std::invalid_argument("augment: frames smaller than 32 px");
    out = crop_sample(sample, (h - ch) / 2, (w - cw) / 2, ch, cw);
  }
  if (coin(rng)) out = flip_horizontal(out);
  if (coin(rng)) out = flip_vertical(out);
  if (coin(rng)) out = reverse_time(out);
  return out;
}

std::vector<FrameSample> synthetic_translating_rectangles(const SyntheticConfig& config) {
  if (config.count < 1 || config.frames < 3 || config.height < 32 || config.width < 32) {
    throw std::invalid_argument("synthetic data: need count >= 1, frames >= 3 and 32x32 frames");
  }
  std::mt19937_64 rng(config.seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  auto quantize = [](double v) { return static_cast<float>(quantize_byte(static_cast<float>(v))) / 255.0f; };
  // Area of [a, b] covered by a box with edges softened over 1.5 px.
  auto cover = [](double p, double a, double b) {
    constexpr double kSoft = 1.5;
    const double d = std::min(p - a, b - p);
    return std::clamp(d / kSoft + 0.5, 0.0, 1.0);
  };
  const int h = config.height;
  const int w = config.width;
  std::vector<FrameSample> out;
  for (int s = 0; s < config.count; ++s) {
    const int shifts[] = {-6, -4, -2, 2, 4, 6};
    const double dx = shifts[draw(rng, 6)];
    const double dy = shifts[draw(rng, 6)];
    const double rw = uniform(0.25, 0.45) * w;
    const double rh = uniform(0.25, 0.45) * h;
    const double left0 = uniform(8.0 - std::min(dx, 0.0), w - 8.0 - rw - std::max(dx, 0.0));
    const double top0 = uniform(8.0 - std::min(dy, 0.0), h - 8.0 - rh - std::max(dy, 0.0));
    double bg0[3], bg1[3], fg[3];
    for (int c = 0; c < 3; ++c) {
      bg0[c] = uniform(0.05, 0.5);
      bg1[c] = uniform(0.05, 0.5);
      fg[c] = uniform(0.55, 0.95);
    }
    FrameSample sample;
    sample.id = "rect_" + std::to_string(s);
    sample.t = uniform_times(config.frames);
    for (int f = 0; f < config.frames; ++f) {
      const double tau = static_cast<double>(f) / (config.frames - 1);
      const double left = left0 + tau * dx;
      const double top = top0 + tau * dy;
      Frame img(h, w);
      for (int y = 0; y < h; ++y) {
        const double cy = cover(y + 0.5, top, top + rh);
        for (int x = 0; x < w; ++x) {
          const double a = cy * cover(x + 0.5, left, left + rw);
          const double g = (static_cast<double>(x) / (w - 1) + static_cast<double>(y) / (h - 1)) / 2.0;
          for (int c = 0; c < 3; ++c) {
            const double bg = bg0[c] + (bg1[c] - bg0[c]) * g;
            img.at(y, x, c) = quantize(a * fg[c] + (1.0 - a) * bg);
          }
        }
      }
      sample.frames.push_back(std::move(img));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

std::string to_string(TaskMode mode) {
  return mode == TaskMode::kSingleFrame ? "single_frame" : "multi_frame";
}

TaskMode parse_task_mode(const std::string& name) {
  if (name == "single_frame") return TaskMode::kSingleFrame;
  if (name == "multi_frame") return TaskMode::kMultiFrame;
  throw std::invalid_argument("unknown task mode '" + name + "' (single_frame or multi_frame)");
}

Dataset::Dataset(std::vector<FrameSample> samples) {
  for (auto& s : samples) {
    ids_.push_back(s.id);
    paths_.emplace_back();
    cache_.emplace_back(std::move(s));
  }
}

Dataset Dataset::from_triplets(const TripletScan& scan) {
  Dataset d;
  for (const auto& s : scan.samples) {
    d.ids_.push_back(s.id);
    d.paths_.push_back({s.i0, s.gt, s.i1});
  }
  d.cache_.resize(d.ids_.size());
  d.skipped_ = scan.skipped;
  return d;
}

Dataset Dataset::from_clips(const std::vector<ClipSample>& clips) {
  Dataset d;
  for (const auto& s : clips) {
    d.ids_.push_back(s.id);
    d.paths_.push_back(s.frames);
  }
  d.cache_.resize(d.ids_.size());
  return d;
}

Dataset Dataset::open(TaskMode mode, const fs::path& root, const std::optional<fs::path>& split_file,
                      int clip_group) {
  if (mode == TaskMode::kSingleFrame) return from_triplets(scan_triplets(root, split_file));
  const auto clips = scan_clips(root, clip_group, clip_group, split_file);
  if (clips.empty()) {
    throw LayoutError("no " + std::to_string(clip_group) + "-frame clips under " + root.string() +
                    "; multi_frame expects clip directories of numbered frames (root/<clip>/*.png), "
                    "use single_frame for triplet directories with im1.png..im3.png");
  }
  return from_clips(clips);
}

FrameSample Dataset::get(std::size_t i) const {
  if (cache_.at(i)) return *cache_[i];
  FrameSample s = load_frames(ids_[i], paths_[i]);
  if (size() <= kCacheLimit) cache_[i] = s;
  return s;
}

void write_samples(const std::vector<FrameSample>& samples, const fs::path& root) {
  for (const auto& s : samples) {
    const fs::path dir = root / s.id;
    fs::create_directories(dir);
    if (s.frames.size() == 3) {
      for (int i = 0; i < 3; ++i) save_image(s.frames[static_cast<std::size_t>(i)], dir / ("im" + std::to_string(i + 1) + ".png"));
    } else {
      for (std::size_t i = 0; i < s.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.png", i);
        save_image(s.frames[i], dir / name);
      }
    }
  }
}

}  // namespace eainterp
