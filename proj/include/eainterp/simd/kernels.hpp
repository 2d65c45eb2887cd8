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
#include <span>
#include <string_view>

namespace eainterp::simd {

// Hyper-parameters of one bias-corrected Adam update.
struct AdamStep {
  float lr = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  // 1 - beta^step, precomputed by the caller.
  float bias1 = 1.0f;
  float bias2 = 1.0f;
};

// Data-parallel inner loops used by the network layers. Every variant must
// agree with the scalar table up to floating-point reassociation.
struct KernelTable {
  std::string_view name;

  // C[M x N] (+)= A[M x K] * B[K x N], all row-major with leading dimensions.
  void (*gemm)(int m, int n, int k, const float* a, int lda, const float* b,
               int ldb, float* c, int ldc, bool accumulate);

  // y = x > 0 ? x : slope * x
  void (*leaky_forward)(const float* x, float* y, std::size_t n, float slope);
  // gx += (x > 0 ? 1 : slope) * gy
  void (*leaky_backward)(const float* x, const float* gy, float* gx,
                         std::size_t n, float slope);
  // y += a * x
  void (*axpy)(float a, const float* x, float* y, std::size_t n);
  // In-place Adam on one parameter buffer.
  void (*adam_update)(float* param, const float* grad, float* m, float* v,
                      std::size_t n, const AdamStep& step);
  // sum |a - b| accumulated in double
  double (*abs_diff_sum)(const float* a, const float* b, std::size_t n);
};

const KernelTable& scalar_kernels();
// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* avx512_kernels();

// Every variant usable on this machine, scalar first.
std::span<const KernelTable* const> available_kernels();

// Best supported variant, unless EA_INTERP_SIMD=scalar|avx2|avx512 names
// another one. Resolved once per process.
const KernelTable& active_kernels();

}  // namespace eainterp::simd
