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

#include "eainterp/edge_fusion.hpp"

namespace eainterp {

MultiChannelImage edge_augment(const Frame& frame, const EdgeMap& edges) {
  require_same_extent(frame, edges, "edge_augment");
  MultiChannelImage out(frame.height(), frame.width(), 3);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const float e = edges.at(y, x);
      for (int c = 0; c < 3; ++c) {
        const float v = frame.at(y, x, c);
        out.at(y, x, c) = 0.5f * (v + v * e);
      }
    }
  }
  return out;
}

MultiChannelImage edge_concat(const Frame& frame, const EdgeMap& edges) {
  require_same_extent(frame, edges, "edge_concat");
  MultiChannelImage out(frame.height(), frame.width(), 6);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const float e = edges.at(y, x);
      for (int c = 0; c < 3; ++c) {
        const float v = frame.at(y, x, c);
        out.at(y, x, c) = v;
        out.at(y, x, 3 + c) = v * e;
      }
    }
  }
  return out;
}

FlowMap two_stream_merge(const FlowMap& flow_from_frames, const FlowMap& flow_from_edges) {
  require_same_extent(flow_from_frames, flow_from_edges, "two_stream_merge");
  FlowMap out(flow_from_frames.height(), flow_from_frames.width());
  const auto a = flow_from_frames.values();
  const auto b = flow_from_edges.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5f * (a[i] + b[i]);
  return out;
}

}  // namespace eainterp
