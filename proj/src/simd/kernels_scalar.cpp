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

#include <cmath>

#include "eainterp/simd/kernels.hpp"

namespace eainterp::simd {
namespace {

void gemm_scalar(int m, int n, int k, const float* a, int lda, const float* b,
                 int ldb, float* c, int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<long>(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0f;
    }
    for (int p = 0; p < k; ++p) {
      const float aip = a[static_cast<long>(i) * lda + p];
      const float* brow = b + static_cast<long>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void leaky_forward_scalar(const float* x, float* y, std::size_t n, float slope) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_backward_scalar(const float* x, const float* gy, float* gx,
                           std::size_t n, float slope) {
  for (std::size_t i = 0; i < n; ++i) gx[i] += (x[i] > 0.0f ? 1.0f : slope) * gy[i];
}

void axpy_scalar(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void adam_update_scalar(float* param, const float* grad, float* m, float* v,
                        std::size_t n, const AdamStep& s) {
  const float step = s.lr / s.bias1;
  const float inv_sqrt_bias2 = 1.0f / std::sqrt(s.bias2);
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad[i];
    m[i] = s.beta1 * m[i] + (1.0f - s.beta1) * g;
    v[i] = s.beta2 * v[i] + (1.0f - s.beta2) * g * g;
    const float denom = std::sqrt(v[i]) * inv_sqrt_bias2 + s.eps;
    param[i] -= step * m[i] / denom;
  }
}

double abs_diff_sum_scalar(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(static_cast<double>(a[i]) - b[i]);
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",          gemm_scalar,        leaky_forward_scalar,
      leaky_backward_scalar, axpy_scalar,    adam_update_scalar,
      abs_diff_sum_scalar,
  };
  return table;
}

}  // namespace eainterp::simd
