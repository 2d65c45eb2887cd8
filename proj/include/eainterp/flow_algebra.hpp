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

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "eainterp/image.hpp"

namespace eainterp {

// Fraction of the interval between the two input frames, in [0, 1].
class TimePoint {
 public:
  explicit TimePoint(double t) : t_(t) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("time point " + std::to_string(t) + " outside [0, 1]");
    }
  }
  double value() const { return t_; }

 private:
  double t_;
};

// Samples source at (x + u, y + v) bilinearly with border replication.
Frame backward_warp(const Frame& source, const FlowMap& flow);

// How the flows towards time t are derived from the bidirectional pair.
enum class FlowForm {
  // F_t0 = -t F_01, F_t1 = (1 - t) F_01
  kForwardLiteral,
  // F_t0 = (t F_10 - t F_01) / 2, F_t1 = ((1 - t) F_01 - (1 - t) F_10) / 2
  kSymmetric,
};

struct IntermediateFlows {
  FlowMap to0;
  FlowMap to1;
};

IntermediateFlows intermediate_flows(const FlowMap& f01, const FlowMap& f10, TimePoint t,
                                     FlowForm form = FlowForm::kSymmetric);

enum class SynthesisSide { kFrom0, kFrom1, kMean };

// Un-refined baseline: warp I0 by F_t0, I1 by F_t1, or average both.
Frame naive_synthesize(const Frame& i0, const Frame& i1, const FlowMap& f01, const FlowMap& f10,
                       TimePoint t, SynthesisSide side, FlowForm form = FlowForm::kSymmetric);

class FloError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Middlebury .flo: "PIEH", int32 width, int32 height, then row-major
// interleaved float32 (u, v), all little-endian.
void write_flo(const FlowMap& flow, const std::filesystem::path& path);
FlowMap read_flo(const std::filesystem::path& path);

// Hue encodes direction (atan2(v, u)), saturation encodes magnitude divided
// by max_magnitude and clamped to 1; value is 1, so zero flow is white. The
// default scale is the map's own largest magnitude, or 1 for an all-zero map.
Frame flow_to_color(const FlowMap& flow, std::optional<double> max_magnitude = std::nullopt);

}  // namespace eainterp
