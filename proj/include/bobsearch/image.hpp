// Copyright 2026 The bobsearch Authors.
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

#ifndef BOBSEARCH_IMAGE_HPP_
#define BOBSEARCH_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace bob {

/// Non-owning view of an interleaved 8-bit RGB raster.
class ImageView {
 public:
  ImageView() = default;
  ImageView(const std::uint8_t* data, int width, int height,
            std::size_t row_stride)
      : data_(data), width_(width), height_(height), stride_(row_stride) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ <= 0 || height_ <= 0; }
  std::size_t stride() const noexcept { return stride_; }

  const std::uint8_t* row(int y) const noexcept {
    return data_ + static_cast<std::size_t>(y) * stride_;
  }
  const std::uint8_t* pixel(int x, int y) const noexcept {
    return row(y) + 3 * static_cast<std::size_t>(x);
  }

  /// Sub-rectangle; the caller guarantees it lies inside this view.
  ImageView crop(int x, int y, int width, int height) const noexcept {
    return ImageView(pixel(x, y), width, height, stride_);
  }

 private:
  const std::uint8_t* data_ = nullptr;
  int width_ = 0;
  int height_ = 0;
  std::size_t stride_ = 0;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w),
        height(h),
        pixels(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
               fill) {}

  bool empty() const noexcept { return width <= 0 || height <= 0; }

  std::uint8_t* pixel(int x, int y) noexcept {
    return pixels.data() +
           3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x));
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::uint8_t* p = pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  ImageView view() const noexcept {
    return ImageView(pixels.data(), width, height,
                     3 * static_cast<std::size_t>(width));
  }
};

/// Decodes an 8-bit PNG or TIFF file (detected by signature) to RGB.
/// Gray and alpha channels are expanded/dropped. Throws ErrorCode::kIo.
RgbImage read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, ImageView image);
void write_tiff(const std::filesystem::path& path, ImageView image);

}  // namespace bob

#endif  // BOBSEARCH_IMAGE_HPP_
