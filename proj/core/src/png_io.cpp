// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include <png.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "genefx/dataset.hpp"

namespace genefx::data {

namespace {

struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

}  // namespace

Image load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  ImageGuard guard{&image};
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot read PNG '" + path.string() + "': " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw IoError("unsupported PNG bit depth in '" + path.string() +
                  "': only 8-bit images are accepted (got 16-bit)");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t c = color ? 3 : 1, h = image.height, w = image.width;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    throw IoError("malformed PNG '" + path.string() + "': " + image.message);
  }
  Image out({c, h, w}, 0.0f);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t ch = 0; ch < c; ++ch)
        out[ch * h * w + y * w + x] = static_cast<float>(buf[(y * w + x) * c + ch]) / 255.0f;
  return out;
}

void save_png(const std::filesystem::path& path, const Image& input) {
  Image img = input;
  if (img.rank() == 4 && img.dim(0) == 1) img = img.reshaped({img.dim(1), img.dim(2), img.dim(3)});
  if (img.rank() != 3 || (img.dim(0) != 1 && img.dim(0) != 3)) {
    throw DimensionError("save_png: expects [C×H×W] with C in {1,3}, got " +
                         shape_str(input.shape()));
  }
  const std::size_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  std::vector<png_byte> buf(c * h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t ch = 0; ch < c; ++ch) {
        const float v = img[ch * h * w + y * w + x];
        const float clamped = std::isnan(v) ? 0.0f : std::min(1.0f, std::max(0.0f, v));
        buf[(y * w + x) * c + ch] = static_cast<png_byte>(std::lround(clamped * 255.0f));
      }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  ImageGuard guard{&image};
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr)) {
    throw IoError("cannot write PNG '" + path.string() + "': " + image.message);
  }
}

}  // namespace genefx::data
