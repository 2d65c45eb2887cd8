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
#include <iosfwd>
#include <vector>

#include "eainterp/nn/layers.hpp"

namespace eainterp::nn {

struct AdamConfig {
  float lr = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// Adam without weight decay over a fixed parameter list. Moments are laid
// out in the parameter set's registration order.
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterSet& params, AdamConfig config);

  // Parameters without an accumulated gradient are treated as zero-gradient.
  void step();
  void zero_grad() const { params_.zero_grad(); }

  void set_lr(float lr) { config_.lr = lr; }
  float lr() const { return config_.lr; }
  std::int64_t steps() const { return steps_; }

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  ParameterSet params_;
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t steps_ = 0;
};

}  // namespace eainterp::nn
