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

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "eainterp/imaging.hpp"

namespace eainterp {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw ImageIoError(path.string() + ": " + what);
}

void check_extent(const std::filesystem::path& path, int h, int w) {
  if (h < kMinFrameExtent || w < kMinFrameExtent) {
    fail(path, "image " + std::to_string(w) + "x" + std::to_string(h) +
                   " is smaller than the 32x32 minimum");
  }
}

Frame read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(path, "cannot open");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng initialization failed");
  }
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG data");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int out_depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  if (channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "unsupported PNG channel layout");
  }
  pixels.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  check_extent(path, height, width);
  Frame frame(height, width);
  const bool wide = out_depth == 16;
  const float maxval = wide ? 65535.0f : 255.0f;
  for (int y = 0; y < height; ++y) {
    const png_byte* row = rows[y];
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int i = x * 3 + c;
        const unsigned v = wide ? (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1] : row[i];
        frame.at(y, x, c) = static_cast<float>(v) / maxval;
      }
    }
  }
  return frame;
}

Frame read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  const bool color = magic[1] == '6';
  auto next_int = [&]() -> long {
    int ch = in.get();
    while (in && (std::isspace(ch) || ch == '#')) {
      if (ch == '#') {
        while (in && ch != '\n') ch = in.get();
      }
      ch = in.get();
    }
    if (!in || !std::isdigit(ch)) fail(path, "corrupt PNM header");
    long v = 0;
    while (in && std::isdigit(ch)) {
      v = v * 10 + (ch - '0');
      if (v > (1L << 30)) fail(path, "corrupt PNM header");
      ch = in.get();
    }
    return v;
  };
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) fail(path, "corrupt PNM header");
  check_extent(path, static_cast<int>(height), static_cast<int>(width));

  const int src_channels = color ? 3 : 1;
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * src_channels * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) fail(path, "truncated PNM payload");

  Frame frame(static_cast<int>(height), static_cast<int>(width));
  const float top = static_cast<float>(maxval);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float px[3];
      for (int c = 0; c < src_channels; ++c, ++i) {
        const unsigned v = bytes == 2 ? (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
        px[c] = std::min(static_cast<float>(v) / top, 1.0f);
      }
      for (int c = 0; c < 3; ++c) frame.at(y, x, c) = px[color ? c : 0];
    }
  }
  return frame;
}

template <int Channels>
void write_png(const PixelGrid<Channels>& img, const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(path, "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng initialization failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(img.width()) * Channels);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "write failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8,
               Channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < Channels; ++c) row[x * Channels + c] = quantize_byte(img.at(y, x, c));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) fail(path, "write failed");
}

}  // namespace

Frame load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(path, "no such file or not readable");
  unsigned char head[8] = {};
  probe.read(reinterpret_cast<char*>(head), 8);
  const auto got = probe.gcount();
  probe.close();
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got == 8 && std::equal(head, head + 8, kPngSig)) return read_png(path);
  if (got >= 2 && head[0] == 'P' && (head[1] == '6' || head[1] == '5')) return read_pnm(path);
  fail(path, "unsupported format (expected PNG or binary PPM/PGM)");
}

void save_image(const Frame& frame, const std::filesystem::path& path) { write_png(frame, path); }

void save_image(const EdgeMap& edges, const std::filesystem::path& path) { write_png(edges, path); }

}  // namespace eainterp
