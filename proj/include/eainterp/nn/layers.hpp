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
#include <random>
#include <string>
#include <vector>

#include "eainterp/nn/autograd.hpp"
#include "eainterp/nn/ops.hpp"

namespace eainterp::nn {

struct NamedParameter {
  std::string name;
  Var var;
};

struct NamedBuffer {
  std::string name;
  Tensor* tensor;
};

// Parameters and persistent non-trainable state of a module tree, in a
// fixed registration order.
struct ParameterSet {
  std::vector<NamedParameter> params;
  std::vector<NamedBuffer> buffers;

  std::size_t count() const;
  void zero_grad() const;
  void set_requires_grad(bool on) const;
};

// Uniform He initialization with fan-in scaling for leaky activations:
// bound = gain * sqrt(3 / fan_in), gain = sqrt(2 / (1 + slope^2)).
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, float slope,
         std::mt19937_64& rng);

  Var operator()(const Var& x) const { return conv2d(x, weight_, bias_, stride_, pad_); }

  void zero_init();
  void collect(const std::string& prefix, ParameterSet& out);
  int in_channels() const { return weight_->value.shape().c; }
  int out_channels() const { return weight_->value.shape().n; }

 private:
  Var weight_;
  Var bias_;
  int stride_ = 1;
  int pad_ = 0;
};

class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels);

  Var operator()(const Var& x, bool training) {
    return batch_norm(x, gamma_, beta_, state_, training);
  }
  void collect(const std::string& prefix, ParameterSet& out);

 private:
  Var gamma_;
  Var beta_;
  BatchNormState state_;
};

}  // namespace eainterp::nn
