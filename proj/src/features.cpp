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

#include "bobsearch/features.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <tuple>

#include "bobsearch/error.hpp"
#include "csv.hpp"

namespace bob {

namespace {

std::string line_context(std::size_t line) {
  return "feature file line " + std::to_string(line) + ": ";
}

}  // namespace

std::vector<double> extract_features_reference(ImageView patch) {
  if (patch.empty()) fail(ErrorCode::kEmptyImage, "patch has no pixels");
  const int w = patch.width();
  const int h = patch.height();
  std::vector<double> out(kReferenceDim, 0.0);

  std::vector<double> gray(static_cast<std::size_t>(w) *
                           static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* p = patch.row(y);
    for (int x = 0; x < w; ++x, p += 3) {
      for (std::size_t c = 0; c < 3; ++c) {
        out[c * kColorHistogramBins + p[c]] += 1.0;
      }
      gray[static_cast<std::size_t>(y) * w + x] =
          0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }
  const double pixels = static_cast<double>(w) * static_cast<double>(h);
  for (std::size_t i = 0; i < 3 * kColorHistogramBins; ++i) out[i] /= pixels;

  // Central differences on interior pixels.
  double* orientation = out.data() + 3 * kColorHistogramBins;
  constexpr double kBinWidth = 2.0 * std::numbers::pi / kOrientationBins;
  double total = 0.0;
  for (int y = 1; y + 1 < h; ++y) {
    const std::size_t cell_y = static_cast<std::size_t>(y) * kSpatialGrid /
                               static_cast<std::size_t>(h);
    for (int x = 1; x + 1 < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double gx = gray[i + 1] - gray[i - 1];
      const double gy = gray[i + w] - gray[i - w];
      const double magnitude = std::hypot(gx, gy);
      if (magnitude <= 0.0) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      auto bin = static_cast<std::size_t>(angle / kBinWidth);
      if (bin >= kOrientationBins) bin = 0;
      const std::size_t cell_x = static_cast<std::size_t>(x) * kSpatialGrid /
                                 static_cast<std::size_t>(w);
      orientation[(cell_y * kSpatialGrid + cell_x) * kOrientationBins + bin] +=
          magnitude;
      total += magnitude;
    }
  }
  if (total > 0.0) {
    for (std::size_t i = 0; i < kOrientationBins * kSpatialGrid * kSpatialGrid;
         ++i) {
      orientation[i] /= total;
    }
  }
  return out;
}

std::vector<FeatureVector> import_features(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::is_blank(line)) break;
  }
  if (line_no == 0 || detail::is_blank(line)) {
    fail(ErrorCode::kSchema, "feature file has no header row");
  }
  const auto header = detail::split_csv_line(line);
  if (header.size() != 4 || header[0] != "slide_id" || header[1] != "x" ||
      header[2] != "y") {
    fail(ErrorCode::kSchema, "feature file header must be slide_id,x,y,<d>");
  }
  std::size_t dim = 0;
  if (header[3] != "d") {
    const auto declared = detail::parse_int<std::size_t>(header[3]);
    if (!declared || *declared == 0) {
      fail(ErrorCode::kSchema,
           "feature file header declares invalid dimension '" + header[3] +
               "'");
    }
    dim = *declared;
  }

  std::vector<FeatureVector> out;
  std::set<std::tuple<std::string, std::int32_t, std::int32_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 4) {
      fail(ErrorCode::kDimension, line_context(line_no) + "row has no values");
    }
    const std::size_t row_dim = fields.size() - 3;
    if (dim == 0) dim = row_dim;
    if (row_dim != dim) {
      fail(ErrorCode::kDimension, line_context(line_no) + "expected " +
                                      std::to_string(dim) + " values, found " +
                                      std::to_string(row_dim));
    }
    FeatureVector v;
    v.slide_id = fields[0];
    const auto x = detail::parse_int<std::int32_t>(fields[1]);
    const auto y = detail::parse_int<std::int32_t>(fields[2]);
    if (v.slide_id.empty() || !x || !y || *x < 0 || *y < 0) {
      fail(ErrorCode::kValue,
           line_context(line_no) + "invalid slide_id or coordinates");
    }
    v.patch = {*x, *y};
    v.values.reserve(dim);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      const auto value = detail::parse_double(fields[i]);
      if (!value || !std::isfinite(*value)) {
        fail(ErrorCode::kValue, line_context(line_no) +
                                    "invalid or non-finite value '" +
                                    fields[i] + "' in column " +
                                    std::to_string(i + 1));
      }
      v.values.push_back(*value);
    }
    if (!seen.emplace(v.slide_id, v.patch.x, v.patch.y).second) {
      fail(ErrorCode::kValue, line_context(line_no) + "duplicate patch " +
                                  v.slide_id + " (" + fields[1] + "," +
                                  fields[2] + ")");
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<FeatureVector> load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open feature file " + path.string());
  return import_features(in);
}

FeatureWriter::FeatureWriter(std::ostream& out, std::size_t dim)
    : out_(&out), dim_(dim) {
  out << "slide_id,x,y,";
  if (dim == 0) {
    out << "d\n";
  } else {
    out << dim << '\n';
  }
}

void FeatureWriter::write(const FeatureVector& vector) {
  if (vector.values.size() != dim_) {
    fail(ErrorCode::kDimension,
         "slide " + vector.slide_id + ": mixed feature dimensions");
  }
  *out_ << vector.slide_id << ',' << vector.patch.x << ',' << vector.patch.y;
  for (double value : vector.values) *out_ << ',' << detail::format_g9(value);
  *out_ << '\n';
}

void export_features(std::ostream& out,
                     std::span<const FeatureVector> vectors) {
  FeatureWriter writer(out,
                       vectors.empty() ? 0 : vectors.front().values.size());
  for (const FeatureVector& v : vectors) writer.write(v);
}

}  // namespace bob
