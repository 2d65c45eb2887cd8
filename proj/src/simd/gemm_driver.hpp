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

#include <algorithm>
#include <array>
#include <cstring>
#include <vector>

namespace eainterp::simd::detail {

inline constexpr int kGemmKc = 256;

// Blocked GEMM driver shared by every variant. Micro::run computes an
// MR x NR tile from MR row pointers into A and a packed K x NR panel of B.
template <class Micro>
void gemm_blocked(int m, int n, int k, const float* a, int lda, const float* b,
                  int ldb, float* c, int ldc, bool accumulate) {
  constexpr int MR = Micro::MR;
  constexpr int NR = Micro::NR;
  if (!accumulate) {
    for (int i = 0; i < m; ++i) std::memset(c + static_cast<long>(i) * ldc, 0, sizeof(float) * n);
  }
  if (m == 0 || n == 0 || k == 0) return;

  thread_local std::vector<float> packed;
  thread_local std::vector<float> zeros;
  packed.resize(static_cast<std::size_t>(kGemmKc) * NR);
  zeros.assign(kGemmKc, 0.0f);
  alignas(64) float tile[MR * NR];

  for (int k0 = 0; k0 < k; k0 += kGemmKc) {
    const int kb = std::min(kGemmKc, k - k0);
    for (int j0 = 0; j0 < n; j0 += NR) {
      const int nb = std::min(NR, n - j0);
      for (int kk = 0; kk < kb; ++kk) {
        const float* src = b + static_cast<long>(k0 + kk) * ldb + j0;
        float* dst = packed.data() + kk * NR;
        int j = 0;
        for (; j < nb; ++j) dst[j] = src[j];
        for (; j < NR; ++j) dst[j] = 0.0f;
      }
      for (int i0 = 0; i0 < m; i0 += MR) {
        const int mb = std::min(MR, m - i0);
        std::array<const float*, MR> rows;
        for (int r = 0; r < MR; ++r) {
          rows[r] = r < mb ? a + static_cast<long>(i0 + r) * lda + k0 : zeros.data();
        }
        Micro::run(kb, rows.data(), packed.data(), tile);
        for (int r = 0; r < mb; ++r) {
          float* crow = c + static_cast<long>(i0 + r) * ldc + j0;
          const float* trow = tile + r * NR;
          for (int j = 0; j < nb; ++j) crow[j] += trow[j];
        }
      }
    }
  }
}

}  // namespace eainterp::simd::detail
