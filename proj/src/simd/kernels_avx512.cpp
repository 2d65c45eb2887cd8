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

// Compiled with -mavx512f -mfma. Only GEMM has a 512-bit body; the
// bandwidth-bound elementwise loops reuse the AVX2 versions.

#include <immintrin.h>

#include "eainterp/simd/kernels.hpp"
#include "gemm_driver.hpp"

namespace eainterp::simd {
namespace detail {
const KernelTable& avx2_table();
}

namespace {

struct MicroAvx512 {
  static constexpr int MR = 8;
  static constexpr int NR = 32;

  static void run(int kb, const float* const* rows, const float* panel, float* tile) {
    __m512 acc[MR][2];
    for (int r = 0; r < MR; ++r) {
      acc[r][0] = _mm512_setzero_ps();
      acc[r][1] = _mm512_setzero_ps();
    }
    for (int p = 0; p < kb; ++p) {
      const __m512 b0 = _mm512_loadu_ps(panel + p * NR);
      const __m512 b1 = _mm512_loadu_ps(panel + p * NR + 16);
#pragma GCC unroll 8
      for (int r = 0; r < MR; ++r) {
        const __m512 a = _mm512_set1_ps(rows[r][p]);
        acc[r][0] = _mm512_fmadd_ps(a, b0, acc[r][0]);
        acc[r][1] = _mm512_fmadd_ps(a, b1, acc[r][1]);
      }
    }
    for (int r = 0; r < MR; ++r) {
      _mm512_store_ps(tile + r * NR, acc[r][0]);
      _mm512_store_ps(tile + r * NR + 16, acc[r][1]);
    }
  }
};

void gemm_avx512(int m, int n, int k, const float* a, int lda, const float* b,
                 int ldb, float* c, int ldc, bool accumulate) {
  detail::gemm_blocked<MicroAvx512>(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

}  // namespace

namespace detail {
const KernelTable& avx512_table() {
  static const KernelTable table = [] {
    KernelTable t = avx2_table();
    t.name = "avx512";
    t.gemm = gemm_avx512;
    return t;
  }();
  return table;
}
}  // namespace detail

}  // namespace eainterp::simd
