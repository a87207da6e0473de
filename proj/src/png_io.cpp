// Copyright (c) 2026 the hnmpgd authors
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

#include "hnmpgd/png_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

static_assert(std::endian::native == std::endian::little,
              "raw stream and checkpoint formats assume a little-endian host");

namespace hnmpgd {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint8_t quantize(double v) {
  const double scaled = std::round(v * 255.0);  // std::round is half away from zero
  if (scaled <= 0.0) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(scaled);
}

void write_png_bytes(const std::filesystem::path& path, Index h, Index w, int channels,
                     const std::vector<std::uint8_t>& interleaved) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("save_png: cannot open " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("save_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("save_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("save_png: write failed for " + path.string());
  }

  png_init_io(png, fp.get());
  const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  const std::size_t stride = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
  for (Index y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(interleaved.data() + static_cast<std::size_t>(y) * stride);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void save_png(const ImageD& img, const std::filesystem::path& path) {
  const Index h = img.height(), w = img.width();
  const int c = img.channels();
  if (h < 1 || w < 1 || (c != 1 && c != 3)) throw InvalidArgumentError("save_png: bad image shape");

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h * w * c));
  std::size_t i = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) bytes[i++] = quantize(img(y, x, ch));
  write_png_bytes(path, h, w, c, bytes);
}

void save_png(const Mask& mask, const std::filesystem::path& path) {
  const Index h = mask.rows(), w = mask.cols();
  if (h < 1 || w < 1) throw InvalidArgumentError("save_png: empty mask");

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h * w));
  std::size_t i = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) bytes[i++] = mask(y, x) ? 255 : 0;
  write_png_bytes(path, h, w, 1, bytes);
}

ImageD load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("load_png: cannot open " + path.string());

  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw MalformedFileError("load_png: not a PNG file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("load_png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("load_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw MalformedFileError("load_png: corrupt PNG: " + path.string());
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw UnsupportedBitDepthError("load_png: 16-bit PNG not supported: " + path.string());
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const Index h = static_cast<Index>(png_get_image_height(png, info));
  const Index w = static_cast<Index>(png_get_image_width(png, info));
  const int channels = static_cast<int>(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw MalformedFileError("load_png: unsupported channel layout: " + path.string());
  }

  const std::size_t stride = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h) * stride);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (Index y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] = bytes.data() + static_cast<std::size_t>(y) * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageD img(h, w, channels);
  std::size_t i = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int ch = 0; ch < channels; ++ch) img(y, x, ch) = static_cast<double>(bytes[i++]) / 255.0;
  return img;
}

Mask mask_from_image(const ImageD& img) {
  if (img.channels() != 1) throw InvalidArgumentError("mask_from_image: expected 1 channel");
  return (img.chan[0] > 0.5).cast<std::uint8_t>();
}

void save_raw(const SalienceMap& map, const std::filesystem::path& path) {
  if (map.rows() < 1 || map.cols() < 1) throw InvalidArgumentError("save_raw: empty map");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_raw: cannot open " + path.string());

  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(map.rows()),
                                 static_cast<std::uint32_t>(map.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Index y = 0; y < map.rows(); ++y)
    for (Index x = 0; x < map.cols(); ++x) {
      const float v = static_cast<float>(map(y, x));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!out) throw IoError("save_raw: write failed for " + path.string());
}

SalienceMap load_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_raw: cannot open " + path.string());

  std::uint32_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] == 0 || dims[1] == 0) throw MalformedFileError("load_raw: bad header: " + path.string());

  SalienceMap map(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
  for (Index y = 0; y < map.rows(); ++y)
    for (Index x = 0; x < map.cols(); ++x) {
      float v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      map(y, x) = static_cast<double>(v);
    }
  if (!in) throw MalformedFileError("load_raw: truncated stream: " + path.string());
  return map;
}

}  // namespace hnmpgd
