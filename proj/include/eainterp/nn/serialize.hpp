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
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "eainterp/nn/tensor.hpp"

// Little-endian binary helpers for checkpoint payloads. Hosts are assumed
// little-endian (x86-64, aarch64).

namespace eainterp::nn::io {

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated binary payload");
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const auto n = read_pod<std::uint32_t>(in);
  if (n > (1u << 20)) throw std::runtime_error("implausible string length in payload");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("truncated binary payload");
  return s;
}

inline void write_tensor(std::ostream& out, const Tensor& t) {
  const Shape& s = t.shape();
  for (int e : {s.n, s.c, s.h, s.w}) write_pod<std::int32_t>(out, e);
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
}

inline Tensor read_tensor(std::istream& in) {
  Shape s;
  s.n = read_pod<std::int32_t>(in);
  s.c = read_pod<std::int32_t>(in);
  s.h = read_pod<std::int32_t>(in);
  s.w = read_pod<std::int32_t>(in);
  if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0 || s.numel() > (std::size_t{1} << 31)) {
    throw std::runtime_error("corrupt tensor header " + s.str());
  }
  Tensor t(s);
  in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
  if (!in) throw std::runtime_error("truncated tensor payload");
  return t;
}

}  // namespace eainterp::nn::io
