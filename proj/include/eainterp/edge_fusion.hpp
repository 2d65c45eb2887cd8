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

#include "eainterp/image.hpp"

namespace eainterp {

// (I + I * E) / 2 with E broadcast over the color channels: non-edge pixels
// are halved, edge pixels kept.
MultiChannelImage edge_augment(const Frame& frame, const EdgeMap& edges);

// [I ; I * E], six channels.
MultiChannelImage edge_concat(const Frame& frame, const EdgeMap& edges);

// (F_frames + F_edges) / 2, elementwise.
FlowMap two_stream_merge(const FlowMap& flow_from_frames, const FlowMap& flow_from_edges);

}  // namespace eainterp
