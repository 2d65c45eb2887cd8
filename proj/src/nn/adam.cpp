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

#include "eainterp/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "eainterp/nn/serialize.hpp"
#include "eainterp/simd/kernels.hpp"

namespace eainterp::nn {

Adam::Adam(const ParameterSet& params, AdamConfig config) : params_(params), config_(config) {
  for (const auto& p : params_.params) {
    m_.emplace_back(p.var->value.shape());
    v_.emplace_back(p.var->value.shape());
  }
}

void Adam::step() {
  ++steps_;
  simd::AdamStep s;
  s.lr = config_.lr;
  s.beta1 = config_.beta1;
  s.beta2 = config_.beta2;
  s.eps = config_.eps;
  s.bias1 = static_cast<float>(1.0 - std::pow(static_cast<double>(config_.beta1), steps_));
  s.bias2 = static_cast<float>(1.0 - std::pow(static_cast<double>(config_.beta2), steps_));
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < params_.params.size(); ++i) {
    Node& p = *params_.params[i].var;
    if (!p.has_grad()) p.grad_buffer();
    k.adam_update(p.value.data(), p.grad.data(), m_[i].data(), v_[i].data(), p.value.size(), s);
  }
}

void Adam::save(std::ostream& out) const {
  io::write_pod<std::int64_t>(out, steps_);
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m_.size()));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    io::write_tensor(out, m_[i]);
    io::write_tensor(out, v_[i]);
  }
}

void Adam::load(std::istream& in) {
  steps_ = io::read_pod<std::int64_t>(in);
  const auto n = io::read_pod<std::uint32_t>(in);
  if (n != m_.size()) throw std::runtime_error("optimizer state has " + std::to_string(n) +
                                               " slots, expected " + std::to_string(m_.size()));
  for (std::size_t i = 0; i < n; ++i) {
    Tensor m = io::read_tensor(in);
    Tensor v = io::read_tensor(in);
    if (!(m.shape() == m_[i].shape()) || !(v.shape() == v_[i].shape())) {
      throw std::runtime_error("optimizer moment shape mismatch at slot " + std::to_string(i));
    }
    m_[i] = std::move(m);
    v_[i] = std::move(v);
  }
}

}  // namespace eainterp::nn
