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

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "eainterp/simd/kernels.hpp"

namespace eainterp::simd {

#if EAINTERP_HAVE_X86_SIMD
namespace detail {
const KernelTable& avx2_table();
const KernelTable& avx512_table();
}  // namespace detail
#endif

const KernelTable* avx2_kernels() {
#if EAINTERP_HAVE_X86_SIMD
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* avx512_kernels() {
#if EAINTERP_HAVE_X86_SIMD
  static const bool ok = __builtin_cpu_supports("avx512f") && avx2_kernels() != nullptr;
  return ok ? &detail::avx512_table() : nullptr;
#else
  return nullptr;
#endif
}

std::span<const KernelTable* const> available_kernels() {
  static const std::vector<const KernelTable*> all = [] {
    std::vector<const KernelTable*> v{&scalar_kernels()};
    if (auto* k = avx2_kernels()) v.push_back(k);
    if (auto* k = avx512_kernels()) v.push_back(k);
    return v;
  }();
  return all;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const auto all = available_kernels();
    const KernelTable* best = all.back();
    if (const char* env = std::getenv("EA_INTERP_SIMD")) {
      const std::string_view want(env);
      for (auto* k : all) {
        if (k->name == want) return k;
      }
      std::fprintf(stderr, "EA_INTERP_SIMD=%s unavailable, using %s\n", env,
                   std::string(best->name).c_str());
    }
    return best;
  }();
  return *chosen;
}

}  // namespace eainterp::simd
