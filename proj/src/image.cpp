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

#include "bobsearch/image.hpp"

#include <png.h>
#include <tiffio.h>

#include <array>
#include <fstream>
#include <memory>
#include <string>

#include "bobsearch/error.hpp"

namespace bob {

namespace {

struct TiffCloser {
  void operator()(TIFF* t) const noexcept { TIFFClose(t); }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

[[noreturn]] void io_fail(const std::filesystem::path& path,
                          const std::string& what) {
  fail(ErrorCode::kIo, path.string() + ": " + what);
}

RgbImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    io_fail(path, std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    io_fail(path, "png decode failed: " + message);
  }
  return out;
}

RgbImage read_tiff(const std::filesystem::path& path) {
  TIFFSetWarningHandler(nullptr);
  TiffPtr tiff(TIFFOpen(path.c_str(), "r"));
  if (!tiff) io_fail(path, "cannot open tiff");
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  TIFFGetField(tiff.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tiff.get(), TIFFTAG_IMAGELENGTH, &height);
  if (width == 0 || height == 0) io_fail(path, "empty tiff");

  std::vector<std::uint32_t> abgr(static_cast<std::size_t>(width) * height);
  if (!TIFFReadRGBAImageOriented(tiff.get(), width, height, abgr.data(),
                                 ORIENTATION_TOPLEFT, 0)) {
    io_fail(path, "tiff decode failed");
  }
  RgbImage out(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < abgr.size(); ++i) {
    out.pixels[3 * i + 0] = static_cast<std::uint8_t>(TIFFGetR(abgr[i]));
    out.pixels[3 * i + 1] = static_cast<std::uint8_t>(TIFFGetG(abgr[i]));
    out.pixels[3 * i + 2] = static_cast<std::uint8_t>(TIFFGetB(abgr[i]));
  }
  return out;
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  std::array<unsigned char, 8> magic{};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open image");
    in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    if (in.gcount() < 4) io_fail(path, "file too short to be an image");
  }
  if (png_sig_cmp(magic.data(), 0, magic.size()) == 0) return read_png(path);
  const bool tiff_le = magic[0] == 'I' && magic[1] == 'I';
  const bool tiff_be = magic[0] == 'M' && magic[1] == 'M';
  if (tiff_le || tiff_be) return read_tiff(path);
  io_fail(path, "unsupported image container (expected PNG or TIFF)");
}

void write_png(const std::filesystem::path& path, ImageView image) {
  if (image.empty()) fail(ErrorCode::kEmptyImage, "cannot write empty image");
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  const auto stride = static_cast<png_int_32>(image.stride());
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.row(0), stride,
                               nullptr)) {
    io_fail(path, std::string("png encode failed: ") + png.message);
  }
}

void write_tiff(const std::filesystem::path& path, ImageView image) {
  if (image.empty()) fail(ErrorCode::kEmptyImage, "cannot write empty image");
  TiffPtr tiff(TIFFOpen(path.c_str(), "w"));
  if (!tiff) io_fail(path, "cannot create tiff");
  TIFF* t = tiff.get();
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(image.width()));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH,
               static_cast<std::uint32_t>(image.height()));
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, 3);
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, 8);
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_RGB);
  TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, 1);
  std::vector<std::uint8_t> row(3 * static_cast<std::size_t>(image.width()));
  for (int y = 0; y < image.height(); ++y) {
    std::copy(image.row(y), image.row(y) + row.size(), row.begin());
    if (TIFFWriteScanline(t, row.data(), static_cast<std::uint32_t>(y), 0) <
        0) {
      io_fail(path, "tiff write failed");
    }
  }
}

}  // namespace bob
