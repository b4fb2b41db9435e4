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

#include "bobsearch/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <utility>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "bobsearch/error.hpp"
#include "checksum.hpp"

namespace bob {
namespace {

using Engine = std::mt19937_64;

std::string numbered(const char* prefix, std::size_t i, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, digits, i);
  return buf;
}

std::vector<double> gaussian_vector(std::uint64_t seed, std::size_t dim,
                                    double sigma) {
  Engine rng(seed);
  boost::random::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

void check_file(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

std::vector<SubtypeSpec> simple_subtypes(std::size_t count,
                                         std::size_t per_site,
                                         std::size_t patients) {
  if (per_site == 0) fail(ErrorCode::kInvalidArgument, "per_site must be > 0");
  std::vector<SubtypeSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({numbered("T", i, 2), numbered("SITE", i / per_site, 1),
                   patients});
  }
  return out;
}

Catalog make_catalog(const CatalogSpec& spec) {
  if (spec.max_slides_per_patient == 0) {
    fail(ErrorCode::kInvalidArgument, "max_slides_per_patient must be > 0");
  }
  Engine rng(detail::mix64(spec.seed));
  boost::random::uniform_int_distribution<std::size_t> slides_per_patient(
      1, spec.max_slides_per_patient);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SlideRecord> records;
  for (const SubtypeSpec& subtype : spec.subtypes) {
    for (std::size_t p = 0; p < subtype.patients; ++p) {
      const std::string patient = subtype.code + numbered("-P", p, 3);
      const std::size_t slides = slides_per_patient(rng);
      for (std::size_t s = 0; s < slides; ++s) {
        SlideRecord r;
        r.slide_id = patient + numbered("-S", s, 1);
        r.patient_id = patient;
        r.anatomic_site = subtype.site;
        r.subtype_code = subtype.code;
        const double u = unit(rng);
        if (u < spec.unspecified_fraction) {
          r.section_type = SectionType::kUnspecified;
        } else if (unit(rng) < spec.frozen_fraction) {
          r.section_type = SectionType::kFrozen;
        } else {
          r.section_type = SectionType::kPermanent;
        }
        if (!spec.image_extension.empty()) {
          r.image_path = r.slide_id + spec.image_extension;
        }
        r.mpp = spec.mpp;
        records.push_back(std::move(r));
      }
    }
  }
  return Catalog(std::move(records));
}

void generate_features(
    const FeatureCorpusSpec& spec, const Catalog& catalog,
    const std::function<void(const SlideRecord&,
                             std::vector<FeatureVector>&&)>& sink) {
  if (spec.dim < 2 || spec.patches_per_slide == 0 ||
      spec.patterns_per_subtype == 0) {
    fail(ErrorCode::kInvalidArgument,
         "feature corpus needs dim >= 2, patches and patterns > 0");
  }
  if (!(spec.distinctive_min >= 0.0 &&
        spec.distinctive_min <= spec.distinctive_max &&
        spec.distinctive_max <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "distinctive fraction range invalid");
  }
  if (spec.shared_patterns == 0 && spec.distinctive_min < 1.0) {
    fail(ErrorCode::kInvalidArgument,
         "distinctive fraction < 1 requires shared patterns");
  }

  std::map<std::string, std::vector<std::vector<double>>> own;
  std::vector<std::vector<double>> shared;
  for (std::size_t j = 0; j < spec.shared_patterns; ++j) {
    shared.push_back(gaussian_vector(
        detail::derive_seed(spec.seed, numbered("shared:", j, 1)), spec.dim,
        1.0));
  }

  for (const SlideRecord& r : catalog.records()) {
    auto& protos = own[r.subtype_code];
    if (protos.empty()) {
      for (std::size_t j = 0; j < spec.patterns_per_subtype; ++j) {
        protos.push_back(gaussian_vector(
            detail::derive_seed(spec.seed,
                                "own:" + r.subtype_code + numbered(":", j, 1)),
            spec.dim, 1.0));
      }
    }
    const std::vector<double> patient_offset = gaussian_vector(
        detail::derive_seed(spec.seed, "patient:" + r.patient_id), spec.dim,
        spec.patient_noise);

    Engine rng(detail::derive_seed(spec.seed, "slide:" + r.slide_id));
    // boost's uniform_real never returns on an empty range.
    double distinctive = spec.distinctive_min;
    if (spec.distinctive_max > spec.distinctive_min) {
      boost::random::uniform_real_distribution<double> share(
          spec.distinctive_min, spec.distinctive_max);
      distinctive = share(rng);
    }
    boost::random::bernoulli_distribution<double> pick_own(distinctive);
    boost::random::uniform_int_distribution<std::size_t> pick_proto(
        0, spec.patterns_per_subtype - 1);
    boost::random::uniform_int_distribution<std::size_t> pick_shared(
        0, spec.shared_patterns == 0 ? 0 : spec.shared_patterns - 1);
    boost::random::normal_distribution<double> noise(0.0, spec.patch_noise);

    std::vector<FeatureVector> vectors(spec.patches_per_slide);
    for (std::size_t i = 0; i < spec.patches_per_slide; ++i) {
      FeatureVector& v = vectors[i];
      v.slide_id = r.slide_id;
      // Lay patches out on a 10-wide grid of 1000 px tiles.
      v.patch = {static_cast<std::int32_t>((i % 10) * 1000),
                 static_cast<std::int32_t>((i / 10) * 1000)};
      const std::vector<double>& base = pick_own(rng)
                                            ? protos[pick_proto(rng)]
                                            : shared[pick_shared(rng)];
      v.values.resize(spec.dim);
      for (std::size_t d = 0; d < spec.dim; ++d) {
        v.values[d] = base[d] + patient_offset[d] + noise(rng);
      }
    }
    sink(r, std::move(vectors));
  }
}

FeatureCorpus make_feature_corpus(const FeatureCorpusSpec& spec) {
  FeatureCorpus corpus;
  corpus.catalog = make_catalog(spec.catalog);
  const auto width = static_cast<std::uint32_t>(spec.dim - 1);
  generate_features(spec, corpus.catalog,
                    [&](const SlideRecord& r, std::vector<FeatureVector>&& vs) {
                      BunchOfBarcodes bunch(r.slide_id, width);
                      for (const FeatureVector& v : vs) {
                        bunch.add(minmax_barcode(v.values), v.patch);
                      }
                      corpus.bunches.emplace(r.slide_id, std::move(bunch));
                    });
  return corpus;
}

Catalog write_feature_corpus(const std::filesystem::path& dir,
                             const FeatureCorpusSpec& spec) {
  std::filesystem::create_directories(dir);
  Catalog catalog = make_catalog(spec.catalog);
  {
    const auto path = dir / "catalog.csv";
    std::ofstream out(path);
    write_catalog(out, catalog);
    check_file(out, path);
  }
  const auto path = dir / "features.csv";
  std::ofstream out(path);
  FeatureWriter writer(out, spec.dim);
  generate_features(spec, catalog,
                    [&](const SlideRecord&, std::vector<FeatureVector>&& vs) {
                      for (const FeatureVector& v : vs) writer.write(v);
                    });
  check_file(out, path);
  return catalog;
}

double synthetic_mpp(const SlideImageSpec& spec, double patch_size_um) {
  return patch_size_um / spec.patch_px;
}

namespace {

struct Palette {
  std::array<std::array<double, 3>, 3> colours;  // one per texture
  std::array<double, 3> angles;                  // stripe orientation
  std::array<double, 3> periods;                 // stripe period in px
};

// Subtype look is a pure function of the code, so every slide of a subtype
// shares colours and stripe geometry.
Palette subtype_palette(const std::string& code) {
  Engine rng(detail::derive_seed(0x5EED, "palette:" + code));
  boost::random::uniform_real_distribution<double> red(150.0, 215.0);
  boost::random::uniform_real_distribution<double> green(60.0, 170.0);
  boost::random::uniform_real_distribution<double> blue(120.0, 210.0);
  boost::random::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  boost::random::uniform_real_distribution<double> period(5.0, 16.0);
  Palette p{};
  for (std::size_t t = 0; t < 3; ++t) {
    p.colours[t] = {red(rng), green(rng), blue(rng)};
    p.angles[t] = angle(rng);
    p.periods[t] = period(rng);
  }
  return p;
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

RgbImage synth_slide_image(const std::string& subtype_code, std::uint64_t seed,
                           const SlideImageSpec& spec) {
  if (spec.grid <= 0 || spec.patch_px <= 0 || spec.regions <= 0 ||
      spec.min_tissue_patches <= 0.0 ||
      spec.max_tissue_patches < spec.min_tissue_patches) {
    fail(ErrorCode::kInvalidArgument, "invalid slide image spec");
  }
  const int side = spec.grid * spec.patch_px;
  const double cells = spec.grid;
  Engine rng(seed);
  boost::random::uniform_real_distribution<double> ratio_dist(0.9, 1.0);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);

  // Ellipse axes in patch units, kept half a patch inside the canvas.
  const double max_axis = cells / 2.0 - 0.5;
  double area = spec.min_tissue_patches;
  if (spec.max_tissue_patches > spec.min_tissue_patches) {
    boost::random::uniform_real_distribution<double> area_dist(
        spec.min_tissue_patches, spec.max_tissue_patches);
    area = area_dist(rng);
  }
  double a = std::sqrt(area / (std::numbers::pi * ratio_dist(rng)));
  a = std::min(a, max_axis);
  double b = std::min(area / (std::numbers::pi * a), max_axis);
  if (unit(rng) < 0.5) std::swap(a, b);
  const double cx =
      cells / 2.0 + (unit(rng) * 2.0 - 1.0) * std::max(0.0, max_axis - a);
  const double cy =
      cells / 2.0 + (unit(rng) * 2.0 - 1.0) * std::max(0.0, max_axis - b);

  const Palette palette = subtype_palette(subtype_code);
  struct Region {
    double x, y;
    std::size_t texture;
  };
  std::vector<Region> regions(static_cast<std::size_t>(spec.regions));
  for (std::size_t i = 0; i < regions.size(); ++i) {
    regions[i] = {(cx + (unit(rng) * 2.0 - 1.0) * a) * spec.patch_px,
                  (cy + (unit(rng) * 2.0 - 1.0) * b) * spec.patch_px,
                  i % palette.colours.size()};
  }

  // Per-texture phase increments along x and y.
  std::array<std::array<double, 2>, 3> wave{};
  for (std::size_t t = 0; t < wave.size(); ++t) {
    const double k = 2.0 * std::numbers::pi / palette.periods[t];
    wave[t] = {k * std::cos(palette.angles[t]), k * std::sin(palette.angles[t])};
  }

  RgbImage image(side, side);
  const double px = spec.patch_px;
  boost::random::uniform_int_distribution<int> background(240, 255);
  boost::random::uniform_int_distribution<int> jitter(-12, 12);
  for (int y = 0; y < side; ++y) {
    const double fy = (y + 0.5) / px;
    for (int x = 0; x < side; ++x) {
      const double fx = (x + 0.5) / px;
      const double ex = (fx - cx) / a;
      const double ey = (fy - cy) / b;
      if (ex * ex + ey * ey > 1.0) {
        image.set(x, y, static_cast<std::uint8_t>(background(rng)),
                  static_cast<std::uint8_t>(background(rng)),
                  static_cast<std::uint8_t>(background(rng)));
        continue;
      }
      std::size_t nearest = 0;
      double best = HUGE_VAL;
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const double dx = x - regions[i].x;
        const double dy = y - regions[i].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          nearest = i;
        }
      }
      const std::size_t t = regions[nearest].texture;
      const double stripe =
          28.0 * std::sin(x * wave[t][0] + y * wave[t][1]);
      const auto& c = palette.colours[t];
      image.set(x, y, clamp_byte(c[0] + stripe + jitter(rng)),
                clamp_byte(c[1] + stripe + jitter(rng)),
                clamp_byte(c[2] + stripe + jitter(rng)));
    }
  }
  return image;
}

Catalog write_image_corpus(const std::filesystem::path& dir, CatalogSpec spec,
                           const SlideImageSpec& image_spec) {
  if (spec.image_extension.empty()) spec.image_extension = ".png";
  const bool tiff =
      spec.image_extension == ".tif" || spec.image_extension == ".tiff";
  if (!tiff && spec.image_extension != ".png") {
    fail(ErrorCode::kInvalidArgument,
         "unsupported image extension " + spec.image_extension);
  }
  spec.mpp = synthetic_mpp(image_spec);
  std::filesystem::create_directories(dir);
  Catalog catalog = make_catalog(spec);
  for (const SlideRecord& r : catalog.records()) {
    const RgbImage image = synth_slide_image(
        r.subtype_code, detail::derive_seed(spec.seed, "image:" + r.slide_id),
        image_spec);
    if (tiff) {
      write_tiff(dir / r.image_path, image.view());
    } else {
      write_png(dir / r.image_path, image.view());
    }
  }
  const auto path = dir / "catalog.csv";
  std::ofstream out(path);
  write_catalog(out, catalog);
  check_file(out, path);
  return catalog;
}

}  // namespace bob
