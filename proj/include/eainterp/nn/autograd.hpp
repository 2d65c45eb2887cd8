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

#include <functional>
#include <memory>
#include <vector>

#include "eainterp/nn/tensor.hpp"

namespace eainterp::nn {

struct Node;
using Var = std::shared_ptr<Node>;

// One value in a dynamically recorded computation graph. Ops whose inputs
// all have requires_grad == false record nothing and stay leaves.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<Var> inputs;
  std::function<void(Node&)> backward_fn;

  // Zero-initialized on first use.
  Tensor& grad_buffer();
  bool has_grad() const { return !grad.empty(); }
};

Var constant(Tensor value);
Var parameter(Tensor value);

// Builds an op output. backward_fn is kept only when some input needs grad.
Var make_result(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn);

inline bool needs_grad(const Var& v) { return v && v->requires_grad; }

// Seeds d(root)/d(root) = 1 for every element of root and propagates
// gradients into every reachable node that requires them.
void backward(const Var& root);

}  // namespace eainterp::nn
