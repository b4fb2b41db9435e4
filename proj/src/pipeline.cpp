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

#include "bobsearch/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>
#include <utility>

#include <boost/random/uniform_int_distribution.hpp>
#include <nlohmann/json.hpp>

#include "bobsearch/error.hpp"
#include "checksum.hpp"
#include "csv.hpp"
#include "parallel.hpp"

namespace bob {
namespace {

using nlohmann::json;

// Prefixes the slide id unless the message already names a slide.
[[noreturn]] void rethrow_for_slide(const Error& e, const std::string& id) {
  const std::string_view what = e.what();
  if (what.starts_with("slide ")) throw e;
  fail(e.code(), "slide " + id + ": " + std::string(what));
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string());
  fn(out);
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

void RunConfig::validate() const {
  if (!seed) fail(ErrorCode::kInvalidArgument, "a seed is required");
  PatchSpec probe = patch;
  probe.magnification_mpp = PatchSpec::kDefaultMagnificationMpp;
  probe.validate();
  if (brightness_threshold < 0 || brightness_threshold > 255) {
    fail(ErrorCode::kInvalidArgument, "brightness threshold must be 0..255");
  }
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!(selection_fraction > 0.0 && selection_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "selection fraction must lie in (0, 1]");
  }
  if (features.empty()) {
    fail(ErrorCode::kInvalidArgument, "feature source must not be empty");
  }
}

void apply_config_json(const json& j, RunConfig& config) {
  if (!j.is_object()) fail(ErrorCode::kSchema, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "patch_size_um") {
        config.patch.physical_size_um = value.get<double>();
      } else if (key == "min_tissue_fraction") {
        config.patch.min_tissue_fraction = value.get<double>();
      } else if (key == "brightness_threshold") {
        config.brightness_threshold = value.get<int>();
      } else if (key == "k") {
        config.k = value.get<int>();
      } else if (key == "selection_fraction") {
        config.selection_fraction = value.get<double>();
      } else if (key == "features") {
        config.features = value.get<std::string>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        config.threads = value.get<unsigned>();
      } else {
        fail(ErrorCode::kSchema, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kSchema, std::string("config: ") + e.what());
  }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  apply_config_json(j, config);
}

json config_to_json(const RunConfig& config) {
  json j;
  j["patch_size_um"] = config.patch.physical_size_um;
  j["min_tissue_fraction"] = config.patch.min_tissue_fraction;
  j["brightness_threshold"] = config.brightness_threshold;
  j["k"] = config.k;
  j["selection_fraction"] = config.selection_fraction;
  j["features"] = config.features;
  if (config.seed) j["seed"] = *config.seed;
  // threads is deliberately absent: it never changes results.
  return j;
}

SlideIndexResult index_slide(const SlideRecord& record, ImageView image,
                             const RunConfig& config) {
  config.validate();
  MosaicParams params;
  params.patch = config.patch;
  params.patch.magnification_mpp = record.mpp;
  params.brightness_threshold = config.brightness_threshold;
  params.k = config.k;
  params.selection_fraction = config.selection_fraction;
  params.seed = detail::derive_seed(*config.seed, record.slide_id);

  SlideMosaic built = build_mosaic(record.slide_id, image, params);
  if (built.mosaic.patches.empty()) {
    fail(ErrorCode::kEmptyInput,
         "slide " + record.slide_id + ": no patch reaches the tissue fraction");
  }
  const int size = params.patch.pixel_size();
  SlideIndexResult out;
  out.bunch = BunchOfBarcodes(record.slide_id,
                              static_cast<std::uint32_t>(kReferenceDim - 1));
  for (const MosaicPatch& p : built.mosaic.patches) {
    const std::vector<double> features =
        extract_features_reference(image.crop(p.x, p.y, size, size));
    out.bunch.add(minmax_barcode(features), p.coord());
  }
  out.mosaic = std::move(built.mosaic);
  out.tissue_patch_count = built.tissue_patch_count;
  return out;
}

std::map<std::string, BunchOfBarcodes> bunches_from_features(
    std::span<const FeatureVector> vectors) {
  std::map<std::string, BunchOfBarcodes> out;
  if (vectors.empty()) return out;
  const std::size_t dim = vectors.front().values.size();
  if (dim < 2) {
    fail(ErrorCode::kDimension, "slide " + vectors.front().slide_id +
                                    ": feature vectors need >= 2 values");
  }
  const auto width = static_cast<std::uint32_t>(dim - 1);
  for (const FeatureVector& v : vectors) {
    if (v.values.size() != dim) {
      fail(ErrorCode::kDimension,
           "slide " + v.slide_id + ": feature length " +
               std::to_string(v.values.size()) + ", expected " +
               std::to_string(dim));
    }
    auto it = out.find(v.slide_id);
    if (it == out.end()) {
      it = out.emplace(v.slide_id, BunchOfBarcodes(v.slide_id, width)).first;
    }
    it->second.add(minmax_barcode(v.values), v.patch);
  }
  return out;
}

json IndexBuild::manifest_json() const {
  json slides = json::array();
  for (std::size_t i = 0; i < index.entries().size(); ++i) {
    const SlideIndexEntry& e = index.entries()[i];
    json s;
    s["slide_id"] = e.slide_id;
    s["mosaic_size"] = e.bunch.size();
    if (i < tissue_patch_counts.size()) {
      s["tissue_patches"] = tissue_patch_counts[i];
    }
    slides.push_back(std::move(s));
  }
  json j;
  j["format_version"] = kIndexFormatVersion;
  j["config"] = config_to_json(config);
  j["barcode_width"] = index.width();
  j["entry_count"] = index.size();
  j["total_barcodes"] = index.total_barcodes();
  j["slides"] = std::move(slides);
  return j;
}

IndexBuild build_catalog_index(const Catalog& catalog,
                               const std::filesystem::path& base_dir,
                               const RunConfig& config) {
  config.validate();
  if (catalog.empty()) fail(ErrorCode::kEmptyCatalog, "catalog is empty");
  IndexBuild build;
  build.config = config;

  if (config.features != kReferenceFeatures) {
    const std::vector<FeatureVector> vectors = load_features(config.features);
    build.index = build_index(catalog, bunches_from_features(vectors));
    return build;
  }

  const auto& records = catalog.records();
  std::vector<SlideIndexResult> results(records.size());
  detail::parallel_for(records.size(), config.threads, [&](std::size_t i) {
    const SlideRecord& r = records[i];
    try {
      if (r.image_path.empty()) {
        fail(ErrorCode::kValue, "no image_path in catalog");
      }
      const RgbImage image = read_image(resolve(base_dir, r.image_path));
      results[i] = index_slide(r, image.view(), config);
    } catch (const Error& e) {
      rethrow_for_slide(e, r.slide_id);
    }
  });

  std::map<std::string, BunchOfBarcodes> bunches;
  for (std::size_t i = 0; i < records.size(); ++i) {
    build.tissue_patch_counts.push_back(results[i].tissue_patch_count);
    build.mosaics.push_back(std::move(results[i].mosaic));
    bunches.emplace(records[i].slide_id, std::move(results[i].bunch));
  }
  build.index = build_index(catalog, std::move(bunches));
  return build;
}

IndexBuild cmd_index(const std::filesystem::path& catalog_path,
                     const RunConfig& config,
                     const std::filesystem::path& index_path,
                     const std::filesystem::path& manifest_path,
                     const std::filesystem::path& mosaic_dir) {
  config.validate();
  const Catalog catalog = load_catalog(catalog_path);
  IndexBuild build =
      build_catalog_index(catalog, catalog_path.parent_path(), config);
  for (const auto& p : {index_path, manifest_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  save_index(build.index, index_path);
  if (!manifest_path.empty()) {
    write_file(manifest_path, [&](std::ostream& out) {
      out << build.manifest_json().dump(2) << '\n';
    });
  }
  if (!mosaic_dir.empty() && !build.mosaics.empty()) {
    std::filesystem::create_directories(mosaic_dir);
    for (const Mosaic& m : build.mosaics) {
      write_file(mosaic_dir / (m.slide_id + ".json"), [&](std::ostream& out) {
        out << json(m).dump(2) << '\n';
      });
    }
  }
  return build;
}

std::vector<std::string> sample_slide_ids(const Index& index,
                                          std::size_t count,
                                          std::uint64_t seed) {
  const std::size_t n = index.size();
  count = std::min(count, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(detail::mix64(seed));
  for (std::size_t i = 0; i < count; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i : order) ids.push_back(index.entries()[i].slide_id);
  return ids;
}

void write_pairwise_csv(std::ostream& out, std::span<const std::string> ids,
                        const std::vector<std::vector<double>>& distances) {
  out << "slide_id";
  for (const std::string& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (double d : distances.at(i)) out << ',' << detail::format_g9(d);
    out << '\n';
  }
}

std::map<std::string, std::string> load_grouping(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open grouping " + path.string());
  std::map<std::string, std::string> grouping;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    const std::string where =
        "grouping line " + std::to_string(line_no) + ": ";
    if (!header) {
      if (fields.size() != 2 || fields[0] != "subtype_code" ||
          fields[1] != "group") {
        fail(ErrorCode::kSchema, where + "expected header subtype_code,group");
      }
      header = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      fail(ErrorCode::kSchema, where + "expected two non-empty fields");
    }
    if (!grouping.emplace(fields[0], fields[1]).second) {
      fail(ErrorCode::kDuplicateId, where + "subtype " + fields[0] +
                                        " listed twice");
    }
  }
  if (!header) fail(ErrorCode::kSchema, path.string() + ": missing header");
  return grouping;
}

Evaluation cmd_evaluate(const Index& index, const EvalConfig& config,
                        const std::filesystem::path& out_dir,
                        const EvaluateOutputs& outputs) {
  Evaluation evaluation = evaluate(index, config);
  std::filesystem::create_directories(out_dir);
  const EvalReport& report = evaluation.report;
  write_file(out_dir / "report.csv",
             [&](std::ostream& out) { write_report_csv(out, report); });
  write_file(out_dir / "report_full.csv",
             [&](std::ostream& out) { write_report_csv(out, report, true); });
  write_file(out_dir / "summary.csv",
             [&](std::ostream& out) { write_summary_csv(out, report); });

  const LabeledMatrix confusion =
      confusion_frequency(evaluation.results, outputs.matrix_n);
  write_file(out_dir / "confusion.csv",
             [&](std::ostream& out) { write_matrix_csv(out, confusion); });
  write_file(out_dir / "heatmap.csv", [&](std::ostream& out) {
    write_matrix_csv(out, rescale_heatmap(confusion, evaluation.slide_counts));
  });
  write_file(out_dir / "chord.csv", [&](std::ostream& out) {
    write_matrix_csv(out, chord_matrix(evaluation.results, outputs.matrix_n));
  });

  if (outputs.pairwise_sample) {
    const std::vector<std::string> ids =
        sample_slide_ids(index, *outputs.pairwise_sample, outputs.seed);
    const auto distances = pairwise_distances(index, ids);
    write_file(out_dir / "pairwise.csv", [&](std::ostream& out) {
      write_pairwise_csv(out, ids, distances);
    });
  }
  return evaluation;
}

}  // namespace bob
