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

#include "eainterp/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "eainterp/edge_kernels.hpp"
#include "eainterp/simd/kernels.hpp"
#include "eainterp/warp_kernels.hpp"

namespace eainterp::nn {
namespace {

const simd::KernelTable& kt() { return simd::active_kernels(); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_same(const Var& a, const Var& b, const char* op) {
  require(a->value.shape() == b->value.shape(),
          std::string(op) + ": shape mismatch " + a->value.shape().str() + " vs " +
              b->value.shape().str());
}

// Output columns [lo, hi) whose input column ox * stride - pad + kx is inside [0, w).
std::pair<int, int> valid_columns(int w, int wo, int stride, int pad, int kx) {
  const int off = kx - pad;
  const int lo = off >= 0 ? 0 : (-off + stride - 1) / stride;
  const int hi = std::min(wo, (w - 1 - off) / stride + 1);
  return {std::min(lo, hi), hi};
}

// col[(ci * k + ky) * k + kx][oy * wo + ox]
void im2col(const float* x, int c, int h, int w, int k, int stride, int pad, int ho, int wo,
            float* col) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int ci = 0; ci < c; ++ci) {
    const float* xp = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        float* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * p;
        const auto [lo, hi] = valid_columns(w, wo, stride, pad, kx);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          float* dst = row + static_cast<std::size_t>(oy) * wo;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + wo, 0.0f);
            continue;
          }
          const float* src = xp + static_cast<std::size_t>(iy) * w + (kx - pad);
          std::fill(dst, dst + lo, 0.0f);
          if (stride == 1) {
            std::copy(src + lo, src + hi, dst + lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) dst[ox] = src[ox * stride];
          }
          std::fill(dst + hi, dst + wo, 0.0f);
        }
      }
    }
  }
}

void col2im_add(const float* col, int c, int h, int w, int k, int stride, int pad, int ho, int wo,
                float* x) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int ci = 0; ci < c; ++ci) {
    float* xp = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const float* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * p;
        const auto [lo, hi] = valid_columns(w, wo, stride, pad, kx);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          float* dst = xp + static_cast<std::size_t>(iy) * w + (kx - pad);
          const float* src = row + static_cast<std::size_t>(oy) * wo;
          if (stride == 1) {
            for (int ox = lo; ox < hi; ++ox) dst[ox] += src[ox];
          } else {
            for (int ox = lo; ox < hi; ++ox) dst[ox * stride] += src[ox];
          }
        }
      }
    }
  }
}

Var unary_map(const Var& x, float (*f)(float), float (*df)(float, float)) {
  Tensor out(x->value.shape());
  const float* in = x->value.data();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = f(in[i]);
  return make_result(std::move(out), {x}, [x, df](Node& self) {
    Tensor& g = x->grad_buffer();
    const float* in = x->value.data();
    const float* y = self.value.data();
    const float* gy = self.grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] += gy[i] * df(in[i], y[i]);
  });
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Shape xs = x->value.shape();
  const Shape ws = weight->value.shape();
  require(ws.h == ws.w, "conv2d: kernel must be square");
  require(xs.c == ws.c, "conv2d: input has " + std::to_string(xs.c) + " channels, weight expects " +
                            std::to_string(ws.c));
  const int k = ws.h;
  const int ho = (xs.h + 2 * pad - k) / stride + 1;
  const int wo = (xs.w + 2 * pad - k) / stride + 1;
  require(ho > 0 && wo > 0, "conv2d: input " + xs.str() + " too small for kernel");
  if (bias) require(bias->value.size() == static_cast<std::size_t>(ws.n), "conv2d: bias size");

  const int cout = ws.n;
  const int kk = xs.c * k * k;
  const int p = ho * wo;
  Tensor out(Shape{xs.n, cout, ho, wo});
  std::vector<float> col(static_cast<std::size_t>(kk) * p);
  const auto& K = kt();
  for (int n = 0; n < xs.n; ++n) {
    im2col(x->value.plane(n, 0), xs.c, xs.h, xs.w, k, stride, pad, ho, wo, col.data());
    float* y = out.plane(n, 0);
    K.gemm(cout, p, kk, weight->value.data(), kk, col.data(), p, y, p, false);
    if (bias) {
      for (int co = 0; co < cout; ++co) {
        const float b = bias->value.data()[co];
        float* yp = y + static_cast<std::size_t>(co) * p;
        for (int i = 0; i < p; ++i) yp[i] += b;
      }
    }
  }

  return make_result(std::move(out), {x, weight, bias}, [x, weight, bias, stride, pad, k, ho, wo](Node& self) {
    const Shape xs = x->value.shape();
    const int cout = weight->value.shape().n;
    const int kk = xs.c * k * k;
    const int p = ho * wo;
    const auto& K = kt();
    std::vector<float> buf(static_cast<std::size_t>(kk) * p);
    std::vector<float> wt;
    std::vector<float> gyt;
    std::vector<float> dwt;
    if (needs_grad(x)) {
      wt.resize(static_cast<std::size_t>(kk) * cout);
      const float* wd = weight->value.data();
      for (int co = 0; co < cout; ++co) {
        for (int j = 0; j < kk; ++j) wt[static_cast<std::size_t>(j) * cout + co] = wd[static_cast<std::size_t>(co) * kk + j];
      }
    }
    if (needs_grad(weight)) {
      gyt.resize(static_cast<std::size_t>(p) * cout);
      dwt.assign(static_cast<std::size_t>(kk) * cout, 0.0f);
    }
    for (int n = 0; n < xs.n; ++n) {
      const float* gy = self.grad.plane(n, 0);
      if (needs_grad(weight)) {
        // dW^T += col * gy^T keeps the im2col layout of the forward pass.
        for (int co = 0; co < cout; ++co) {
          const float* row = gy + static_cast<std::size_t>(co) * p;
          for (int i = 0; i < p; ++i) gyt[static_cast<std::size_t>(i) * cout + co] = row[i];
        }
        im2col(x->value.plane(n, 0), xs.c, xs.h, xs.w, k, stride, pad, ho, wo, buf.data());
        K.gemm(kk, cout, p, buf.data(), p, gyt.data(), cout, dwt.data(), cout, true);
      }
      if (needs_grad(bias)) {
        float* gb = bias->grad_buffer().data();
        for (int co = 0; co < cout; ++co) {
          const float* row = gy + static_cast<std::size_t>(co) * p;
          double s = 0.0;
          for (int i = 0; i < p; ++i) s += row[i];
          gb[co] += static_cast<float>(s);
        }
      }
      if (needs_grad(x)) {
        K.gemm(kk, p, cout, wt.data(), cout, gy, p, buf.data(), p, false);
        col2im_add(buf.data(), xs.c, xs.h, xs.w, k, stride, pad, ho, wo, x->grad_buffer().plane(n, 0));
      }
    }
    if (needs_grad(weight)) {
      float* gw = weight->grad_buffer().data();
      for (int co = 0; co < cout; ++co) {
        for (int j = 0; j < kk; ++j) gw[static_cast<std::size_t>(co) * kk + j] += dwt[static_cast<std::size_t>(j) * cout + co];
      }
    }
  });
}

Var leaky_relu(const Var& x, float slope) {
  Tensor out(x->value.shape());
  kt().leaky_forward(x->value.data(), out.data(), out.size(), slope);
  return make_result(std::move(out), {x}, [x, slope](Node& self) {
    kt().leaky_backward(x->value.data(), self.grad.data(), x->grad_buffer().data(), self.grad.size(), slope);
  });
}

Var max_pool2(const Var& x) {
  const Shape s = x->value.shape();
  require(s.h % 2 == 0 && s.w % 2 == 0, "max_pool2: odd extent " + s.str());
  Shape os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor out(os);
  std::vector<std::uint32_t> arg(os.numel());
  std::size_t o = 0;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      for (int y = 0; y < os.h; ++y) {
        for (int xx = 0; xx < os.w; ++xx, ++o) {
          std::uint32_t best = static_cast<std::uint32_t>((2 * y) * s.w + 2 * xx);
          for (std::uint32_t cand : {best + 1, best + static_cast<std::uint32_t>(s.w),
                                     best + static_cast<std::uint32_t>(s.w) + 1}) {
            if (in[cand] > in[best]) best = cand;
          }
          out.data()[o] = in[best];
          arg[o] = best;
        }
      }
    }
  }
  return make_result(std::move(out), {x}, [x, arg = std::move(arg)](Node& self) {
    const Shape s = x->value.shape();
    const std::size_t oplane = self.value.shape().plane();
    Tensor& g = x->grad_buffer();
    for (std::size_t o = 0; o < arg.size(); ++o) {
      const std::size_t nc = o / oplane;
      g.data()[nc * s.plane() + arg[o]] += self.grad.data()[o];
    }
  });
}

Var upsample_nearest2(const Var& x) {
  const Shape s = x->value.shape();
  Tensor out(Shape{s.n, s.c, s.h * 2, s.w * 2});
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* op = out.plane(n, c);
      for (int y = 0; y < 2 * s.h; ++y) {
        for (int xx = 0; xx < 2 * s.w; ++xx) {
          op[static_cast<std::size_t>(y) * 2 * s.w + xx] = in[static_cast<std::size_t>(y / 2) * s.w + xx / 2];
        }
      }
    }
  }
  return make_result(std::move(out), {x}, [x](Node& self) {
    const Shape s = x->value.shape();
    Tensor& g = x->grad_buffer();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        const float* gy = self.grad.plane(n, c);
        float* gx = g.plane(n, c);
        for (int y = 0; y < 2 * s.h; ++y) {
          for (int xx = 0; xx < 2 * s.w; ++xx) {
            gx[static_cast<std::size_t>(y / 2) * s.w + xx / 2] += gy[static_cast<std::size_t>(y) * 2 * s.w + xx];
          }
        }
      }
    }
  });
}

Var sigmoid(const Var& x) {
  return unary_map(
      x, [](float v) { return 1.0f / (1.0f + std::exp(-v)); },
      [](float, float y) { return y * (1.0f - y); });
}

Var log(const Var& x) {
  return unary_map(
      x, [](float v) { return std::log(v); }, [](float v, float) { return 1.0f / v; });
}

Var concat_channels(std::span<const Var> parts) {
  require(!parts.empty(), "concat_channels: no inputs");
  const Shape s0 = parts[0]->value.shape();
  int total = 0;
  for (const auto& p : parts) {
    const Shape s = p->value.shape();
    require(s.n == s0.n && s.h == s0.h && s.w == s0.w,
            "concat_channels: mismatched " + s.str() + " vs " + s0.str());
    total += s.c;
  }
  Tensor out(Shape{s0.n, total, s0.h, s0.w});
  const std::size_t plane = s0.plane();
  for (int n = 0; n < s0.n; ++n) {
    int c0 = 0;
    for (const auto& p : parts) {
      const int c = p->value.shape().c;
      std::copy_n(p->value.plane(n, 0), c * plane, out.plane(n, c0));
      c0 += c;
    }
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return make_result(std::move(out), inputs, [inputs](Node& self) {
    const Shape s = self.value.shape();
    const std::size_t plane = s.plane();
    int c0 = 0;
    for (const auto& p : inputs) {
      const int c = p->value.shape().c;
      if (needs_grad(p)) {
        Tensor& g = p->grad_buffer();
        for (int n = 0; n < s.n; ++n) {
          kt().axpy(1.0f, self.grad.plane(n, c0), g.plane(n, 0), c * plane);
        }
      }
      c0 += c;
    }
  });
}

Var slice_channels(const Var& x, int begin, int count) {
  const Shape s = x->value.shape();
  require(begin >= 0 && count > 0 && begin + count <= s.c, "slice_channels: range outside " + s.str());
  Tensor out(Shape{s.n, count, s.h, s.w});
  for (int n = 0; n < s.n; ++n) std::copy_n(x->value.plane(n, begin), count * s.plane(), out.plane(n, 0));
  return make_result(std::move(out), {x}, [x, begin, count](Node& self) {
    const Shape s = x->value.shape();
    Tensor& g = x->grad_buffer();
    for (int n = 0; n < s.n; ++n) kt().axpy(1.0f, self.grad.plane(n, 0), g.plane(n, begin), count * s.plane());
  });
}

Var add(const Var& a, const Var& b) {
  require_same(a, b, "add");
  Tensor out = a->value;
  kt().axpy(1.0f, b->value.data(), out.data(), out.size());
  return make_result(std::move(out), {a, b}, [a, b](Node& self) {
    if (needs_grad(a)) kt().axpy(1.0f, self.grad.data(), a->grad_buffer().data(), self.grad.size());
    if (needs_grad(b)) kt().axpy(1.0f, self.grad.data(), b->grad_buffer().data(), self.grad.size());
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a, b, "sub");
  Tensor out = a->value;
  kt().axpy(-1.0f, b->value.data(), out.data(), out.size());
  return make_result(std::move(out), {a, b}, [a, b](Node& self) {
    if (needs_grad(a)) kt().axpy(1.0f, self.grad.data(), a->grad_buffer().data(), self.grad.size());
    if (needs_grad(b)) kt().axpy(-1.0f, self.grad.data(), b->grad_buffer().data(), self.grad.size());
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a, b, "mul");
  Tensor out(a->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a->value.data()[i] * b->value.data()[i];
  return make_result(std::move(out), {a, b}, [a, b](Node& self) {
    const float* gy = self.grad.data();
    if (needs_grad(a)) {
      float* g = a->grad_buffer().data();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += gy[i] * b->value.data()[i];
    }
    if (needs_grad(b)) {
      float* g = b->grad_buffer().data();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += gy[i] * a->value.data()[i];
    }
  });
}

Var scale(const Var& x, float s) {
  Tensor out(x->value.shape());
  kt().axpy(s, x->value.data(), out.data(), out.size());
  return make_result(std::move(out), {x}, [x, s](Node& self) {
    kt().axpy(s, self.grad.data(), x->grad_buffer().data(), self.grad.size());
  });
}

Var add_scalar(const Var& x, float s) {
  Tensor out = x->value;
  for (float& v : out.values()) v += s;
  return make_result(std::move(out), {x}, [x](Node& self) {
    kt().axpy(1.0f, self.grad.data(), x->grad_buffer().data(), self.grad.size());
  });
}

Var mul_broadcast(const Var& x, const Var& m) {
  const Shape xs = x->value.shape();
  const Shape ms = m->value.shape();
  require(ms.n == xs.n && ms.c == 1 && ms.h == xs.h && ms.w == xs.w,
          "mul_broadcast: mask " + ms.str() + " does not broadcast onto " + xs.str());
  Tensor out(xs);
  const std::size_t plane = xs.plane();
  for (int n = 0; n < xs.n; ++n) {
    const float* mp = m->value.plane(n, 0);
    for (int c = 0; c < xs.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* op = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) op[i] = in[i] * mp[i];
    }
  }
  return make_result(std::move(out), {x, m}, [x, m](Node& self) {
    const Shape xs = x->value.shape();
    const std::size_t plane = xs.plane();
    for (int n = 0; n < xs.n; ++n) {
      const float* mp = m->value.plane(n, 0);
      for (int c = 0; c < xs.c; ++c) {
        const float* gy = self.grad.plane(n, c);
        if (needs_grad(x)) {
          float* gx = x->grad_buffer().plane(n, c);
          for (std::size_t i = 0; i < plane; ++i) gx[i] += gy[i] * mp[i];
        }
        if (needs_grad(m)) {
          const float* in = x->value.plane(n, c);
          float* gm = m->grad_buffer().plane(n, 0);
          for (std::size_t i = 0; i < plane; ++i) gm[i] += gy[i] * in[i];
        }
      }
    }
  });
}

Var scale_per_sample(const Var& x, std::span<const float> factors) {
  const Shape s = x->value.shape();
  require(factors.size() == static_cast<std::size_t>(s.n), "scale_per_sample: factor count");
  const std::size_t per = static_cast<std::size_t>(s.c) * s.plane();
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    const float f = factors[n];
    const float* in = x->value.plane(n, 0);
    float* op = out.plane(n, 0);
    for (std::size_t i = 0; i < per; ++i) op[i] = f * in[i];
  }
  std::vector<float> fs(factors.begin(), factors.end());
  return make_result(std::move(out), {x}, [x, fs](Node& self) {
    const Shape s = x->value.shape();
    const std::size_t per = static_cast<std::size_t>(s.c) * s.plane();
    for (int n = 0; n < s.n; ++n) kt().axpy(fs[n], self.grad.plane(n, 0), x->grad_buffer().plane(n, 0), per);
  });
}

Var clamp(const Var& x, float lo, float hi) {
  Tensor out(x->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::clamp(x->value.data()[i], lo, hi);
  return make_result(std::move(out), {x}, [x, lo, hi](Node& self) {
    float* g = x->grad_buffer().data();
    const float* in = x->value.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (in[i] > lo && in[i] < hi) g[i] += self.grad.data()[i];
    }
  });
}

Var mean(const Var& x) {
  double s = 0.0;
  for (float v : x->value.values()) s += v;
  const std::size_t count = x->value.size();
  Tensor out(Shape{1, 1, 1, 1}, static_cast<float>(s / static_cast<double>(count)));
  return make_result(std::move(out), {x}, [x, count](Node& self) {
    const float g = self.grad.data()[0] / static_cast<float>(count);
    for (float& v : x->grad_buffer().values()) v += g;
  });
}

Var mean_per_sample(const Var& x) {
  const Shape s = x->value.shape();
  const std::size_t per = static_cast<std::size_t>(s.c) * s.plane();
  Tensor out(Shape{s.n, 1, 1, 1});
  for (int n = 0; n < s.n; ++n) {
    double acc = 0.0;
    const float* in = x->value.plane(n, 0);
    for (std::size_t i = 0; i < per; ++i) acc += in[i];
    out.data()[n] = static_cast<float>(acc / static_cast<double>(per));
  }
  return make_result(std::move(out), {x}, [x, per](Node& self) {
    const Shape s = x->value.shape();
    for (int n = 0; n < s.n; ++n) {
      const float g = self.grad.data()[n] / static_cast<float>(per);
      float* gx = x->grad_buffer().plane(n, 0);
      for (std::size_t i = 0; i < per; ++i) gx[i] += g;
    }
  });
}

Var l1_mean(const Var& a, const Var& b) {
  require_same(a, b, "l1_mean");
  const std::size_t count = a->value.size();
  const double total = kt().abs_diff_sum(a->value.data(), b->value.data(), count);
  Tensor out(Shape{1, 1, 1, 1}, static_cast<float>(total / static_cast<double>(count)));
  return make_result(std::move(out), {a, b}, [a, b, count](Node& self) {
    const float g = self.grad.data()[0] / static_cast<float>(count);
    const float* av = a->value.data();
    const float* bv = b->value.data();
    float* ga = needs_grad(a) ? a->grad_buffer().data() : nullptr;
    float* gb = needs_grad(b) ? b->grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < count; ++i) {
      const float d = av[i] - bv[i];
      const float sg = d > 0.0f ? g : (d < 0.0f ? -g : 0.0f);
      if (ga) ga[i] += sg;
      if (gb) gb[i] -= sg;
    }
  });
}

Var batch_norm(const Var& x, const Var& gamma, const Var& beta, BatchNormState& state, bool training) {
  const Shape s = x->value.shape();
  require(gamma->value.size() == static_cast<std::size_t>(s.c) &&
              beta->value.size() == static_cast<std::size_t>(s.c),
          "batch_norm: affine size");
  if (state.running_mean.empty()) {
    state.running_mean = Tensor(Shape{1, s.c, 1, 1}, 0.0f);
    state.running_var = Tensor(Shape{1, s.c, 1, 1}, 1.0f);
  }
  const std::size_t plane = s.plane();
  const std::size_t count = static_cast<std::size_t>(s.n) * plane;
  std::vector<float> mean_c(s.c), inv_std(s.c);
  for (int c = 0; c < s.c; ++c) {
    if (training) {
      double m = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const float* in = x->value.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) m += in[i];
      }
      m /= static_cast<double>(count);
      double v = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const float* in = x->value.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) v += (in[i] - m) * (in[i] - m);
      }
      const double biased = v / static_cast<double>(count);
      const double unbiased = count > 1 ? v / static_cast<double>(count - 1) : biased;
      mean_c[c] = static_cast<float>(m);
      inv_std[c] = static_cast<float>(1.0 / std::sqrt(biased + state.eps));
      float& rm = state.running_mean.data()[c];
      float& rv = state.running_var.data()[c];
      rm = (1.0f - state.momentum) * rm + state.momentum * static_cast<float>(m);
      rv = (1.0f - state.momentum) * rv + state.momentum * static_cast<float>(unbiased);
    } else {
      mean_c[c] = state.running_mean.data()[c];
      inv_std[c] = 1.0f / std::sqrt(state.running_var.data()[c] + state.eps);
    }
  }
  Tensor xhat(s);
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* hp = xhat.plane(n, c);
      float* op = out.plane(n, c);
      const float g = gamma->value.data()[c];
      const float b = beta->value.data()[c];
      for (std::size_t i = 0; i < plane; ++i) {
        hp[i] = (in[i] - mean_c[c]) * inv_std[c];
        op[i] = g * hp[i] + b;
      }
    }
  }
  return make_result(std::move(out), {x, gamma, beta},
                     [x, gamma, beta, training, xhat = std::move(xhat), inv_std](Node& self) {
    const Shape s = x->value.shape();
    const std::size_t plane = s.plane();
    const double count = static_cast<double>(s.n) * plane;
    for (int c = 0; c < s.c; ++c) {
      double sum_g = 0.0, sum_gh = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const float* gy = self.grad.plane(n, c);
        const float* hp = xhat.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_g += gy[i];
          sum_gh += gy[i] * hp[i];
        }
      }
      if (needs_grad(gamma)) gamma->grad_buffer().data()[c] += static_cast<float>(sum_gh);
      if (needs_grad(beta)) beta->grad_buffer().data()[c] += static_cast<float>(sum_g);
      if (!needs_grad(x)) continue;
      const float g = gamma->value.data()[c];
      for (int n = 0; n < s.n; ++n) {
        const float* gy = self.grad.plane(n, c);
        const float* hp = xhat.plane(n, c);
        float* gx = x->grad_buffer().plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          if (training) {
            gx[i] += static_cast<float>(g * inv_std[c] *
                                        (gy[i] - sum_g / count - hp[i] * sum_gh / count));
          } else {
            gx[i] += g * inv_std[c] * gy[i];
          }
        }
      }
    }
  });
}

Var warp(const Var& src, const Var& flow) {
  const Shape s = src->value.shape();
  const Shape f = flow->value.shape();
  require(f.n == s.n && f.c == 2 && f.h == s.h && f.w == s.w,
          "warp: flow " + f.str() + " does not match source " + s.str());
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    kernels::warp_forward(src->value.plane(n, 0), s.c, s.h, s.w, flow->value.plane(n, 0), out.plane(n, 0));
  }
  return make_result(std::move(out), {src, flow}, [src, flow](Node& self) {
    const Shape s = src->value.shape();
    for (int n = 0; n < s.n; ++n) {
      kernels::warp_backward(src->value.plane(n, 0), s.c, s.h, s.w, flow->value.plane(n, 0),
                             self.grad.plane(n, 0),
                             needs_grad(src) ? src->grad_buffer().plane(n, 0) : nullptr,
                             needs_grad(flow) ? flow->grad_buffer().plane(n, 0) : nullptr);
    }
  });
}

Var soft_edges(const Var& rgb) {
  const Shape s = rgb->value.shape();
  require(s.c == 3, "soft_edges: expected 3 channels, got " + s.str());
  Tensor out(Shape{s.n, 1, s.h, s.w});
  for (int n = 0; n < s.n; ++n) kernels::soft_edges_forward(rgb->value.plane(n, 0), s.h, s.w, out.plane(n, 0));
  return make_result(std::move(out), {rgb}, [rgb](Node& self) {
    const Shape s = rgb->value.shape();
    for (int n = 0; n < s.n; ++n) {
      kernels::soft_edges_backward(rgb->value.plane(n, 0), s.h, s.w, self.grad.plane(n, 0),
                                   rgb->grad_buffer().plane(n, 0));
    }
  });
}

}  // namespace eainterp::nn
