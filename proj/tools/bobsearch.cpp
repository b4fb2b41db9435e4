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

// bobsearch command-line tool. Built only on the public C API.

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bobsearch/bobsearch.h"

namespace {

int report(bob_status status) {
  if (status == BOB_OK) return 0;
  std::fprintf(stderr, "bobsearch: %s: %s\n", bob_status_name(status),
               bob_last_error_message());
  return 1;
}

// Owns an opened index for the duration of a command.
class IndexHandle {
 public:
  IndexHandle() = default;
  IndexHandle(const IndexHandle&) = delete;
  IndexHandle& operator=(const IndexHandle&) = delete;
  ~IndexHandle() { bob_index_close(index_); }

  bob_status open(const std::string& path) {
    return bob_index_open(path.c_str(), &index_);
  }
  const bob_index* get() const { return index_; }

 private:
  bob_index* index_ = nullptr;
};

const std::map<std::string, bob_scope> kScopes = {
    {"horizontal", BOB_SCOPE_HORIZONTAL}, {"vertical", BOB_SCOPE_VERTICAL}};
const std::map<std::string, bob_section> kSections = {
    {"all", BOB_SECTION_ALL},
    {"frozen", BOB_SECTION_FROZEN},
    {"permanent", BOB_SECTION_PERMANENT}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whole-slide image search with bunches of barcodes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bob_version()));

  // index
  auto* index_cmd = app.add_subcommand("index", "Build an index from a catalog");
  std::string catalog_path, index_path, manifest_path, mosaic_dir, config_path;
  std::string features = "reference";
  std::uint64_t seed = 0;
  int k = 9;
  double fraction = 0.15, patch_um = 500.0, min_tissue = 0.5;
  int threshold = 220;
  unsigned threads = 1;
  index_cmd->add_option("--catalog", catalog_path, "Catalog CSV")->required();
  index_cmd->add_option("--index", index_path, "Index file to write")
      ->required();
  index_cmd->add_option("--manifest", manifest_path,
                        "Build manifest (default: <index>.manifest.json)");
  index_cmd->add_option("--mosaics", mosaic_dir,
                        "Directory for per-slide mosaic JSON");
  index_cmd->add_option("--config", config_path,
                        "JSON config file; flags take precedence");
  auto* index_seed = index_cmd->add_option("--seed", seed, "Run seed");
  auto* index_k = index_cmd->add_option("--k", k, "Clusters per slide");
  auto* index_fraction = index_cmd->add_option(
      "--fraction", fraction, "Share of each cluster kept in the mosaic");
  auto* index_features = index_cmd->add_option(
      "--features", features, "'reference' or a feature CSV path");
  auto* index_patch = index_cmd->add_option("--patch-size-um", patch_um,
                                            "Patch side in micrometres");
  auto* index_tissue = index_cmd->add_option(
      "--min-tissue", min_tissue, "Minimum tissue fraction per patch");
  auto* index_threshold = index_cmd->add_option(
      "--threshold", threshold, "Background brightness threshold");
  auto* index_threads = index_cmd->add_option("--threads", threads,
                                              "Worker threads");

  // search
  auto* search_cmd = app.add_subcommand("search", "Rank slides for a query");
  std::string slide_id, site;
  std::string scope = "horizontal", section = "all";
  std::size_t n = 10;
  search_cmd->add_option("--index", index_path, "Index file")->required();
  search_cmd->add_option("--slide", slide_id, "Query slide id")->required();
  search_cmd->add_option("--scope", scope)
      ->check(CLI::IsMember({"horizontal", "vertical"}));
  search_cmd->add_option("--site", site, "Vertical scope site override");
  search_cmd->add_option("--section", section)
      ->check(CLI::IsMember({"all", "frozen", "permanent"}));
  search_cmd->add_option("--n", n, "Number of hits");
  search_cmd->add_option("--threads", threads, "Worker threads");

  // evaluate
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Leave-one-patient-out evaluation");
  std::string out_path, groups_path;
  std::vector<std::size_t> ns;
  std::size_t pairwise = 0;
  eval_cmd->add_option("--index", index_path, "Index file")->required();
  eval_cmd->add_option("--out", out_path, "Output directory")->required();
  eval_cmd->add_option("--seed", seed, "Run seed")->required();
  eval_cmd->add_option("--scope", scope)
      ->check(CLI::IsMember({"horizontal", "vertical"}));
  eval_cmd->add_option("--section", section)
      ->check(CLI::IsMember({"all", "frozen", "permanent"}));
  eval_cmd->add_option("--n", ns, "Comma-separated n values")->delimiter(',');
  eval_cmd->add_option("--groups", groups_path,
                       "CSV subtype_code,group for horizontal grouping");
  eval_cmd->add_option("--pairwise", pairwise,
                       "Also write pairwise.csv for this many sampled slides");
  eval_cmd->add_option("--threads", threads, "Worker threads");

  // export-pairwise
  auto* pair_cmd = app.add_subcommand("export-pairwise",
                                      "Pairwise distance matrix as CSV");
  std::vector<std::string> slides;
  std::size_t sample = 0;
  pair_cmd->add_option("--index", index_path, "Index file")->required();
  pair_cmd->add_option("--out", out_path, "Output CSV")->required();
  pair_cmd->add_option("--seed", seed, "Sampling seed")->required();
  auto* pair_slides =
      pair_cmd->add_option("--slides", slides, "Comma-separated slide ids")
          ->delimiter(',');
  auto* pair_sample =
      pair_cmd->add_option("--sample", sample, "Number of slides to sample");
  pair_slides->excludes(pair_sample);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Per-subtype catalog counts");
  stats_cmd->add_option("--catalog", catalog_path, "Catalog CSV")->required();
  stats_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Write a synthetic demo corpus");
  bob_synth_options synth;
  bob_synth_options_init(&synth);
  std::string kind = "images", format = "png";
  synth_cmd->add_option("--out", out_path, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--kind", kind, "Slide images or a feature CSV")
      ->capture_default_str()
      ->check(CLI::IsMember({"images", "features"}));
  synth_cmd->add_option("--format", format, "Image file format")
      ->capture_default_str()
      ->check(CLI::IsMember({"png", "tiff"}));
  synth_cmd->add_option("--subtypes", synth.subtypes, "Number of subtypes")
      ->capture_default_str();
  synth_cmd->add_option("--per-site", synth.subtypes_per_site,
                        "Subtypes sharing one anatomic site")
      ->capture_default_str();
  synth_cmd->add_option("--patients", synth.patients_per_subtype,
                        "Patients per subtype")
      ->capture_default_str();
  synth_cmd->add_option("--slides-per-patient", synth.max_slides_per_patient,
                        "Upper bound on slides per patient")
      ->capture_default_str();
  synth_cmd->add_option("--patches", synth.patches_per_slide,
                        "Feature corpus: patches per slide");
  synth_cmd->add_option("--dim", synth.dim, "Feature corpus: dimension");

  CLI11_PARSE(app, argc, argv);

  if (index_cmd->parsed()) {
    bob_index_options options;
    bob_index_options_init(&options);
    if (!config_path.empty()) {
      if (int rc = report(
              bob_index_options_load_config(&options, config_path.c_str()))) {
        return rc;
      }
    }
    if (index_seed->count()) {
      options.seed = seed;
      options.has_seed = 1;
    }
    if (index_k->count()) options.k = k;
    if (index_fraction->count()) options.selection_fraction = fraction;
    if (index_features->count()) options.features = features.c_str();
    if (index_patch->count()) options.patch_size_um = patch_um;
    if (index_tissue->count()) options.min_tissue_fraction = min_tissue;
    if (index_threshold->count()) options.brightness_threshold = threshold;
    if (index_threads->count()) options.threads = threads;
    if (!mosaic_dir.empty()) options.mosaic_dir = mosaic_dir.c_str();
    if (manifest_path.empty()) manifest_path = index_path + ".manifest.json";
    return report(bob_build_index(catalog_path.c_str(), &options,
                                  index_path.c_str(), manifest_path.c_str()));
  }

  if (search_cmd->parsed()) {
    IndexHandle index;
    if (int rc = report(index.open(index_path))) return rc;
    bob_search_options options;
    bob_search_options_init(&options);
    options.scope = kScopes.at(scope);
    options.section = kSections.at(section);
    options.site = site.c_str();
    options.threads = threads;
    bob_hits* hits = nullptr;
    if (int rc = report(bob_search(index.get(), slide_id.c_str(), n, &options,
                                   &hits))) {
      return rc;
    }
    std::printf("rank,slide_id,subtype,distance\n");
    for (std::size_t i = 0; i < bob_hits_count(hits); ++i) {
      bob_hit hit;
      bob_hits_get(hits, i, &hit);
      // Distances are medians of integers, so one decimal is exact.
      std::printf("%zu,%s,%s,%.1f\n", i + 1, hit.slide_id, hit.subtype_code,
                  hit.distance);
    }
    bob_hits_free(hits);
    return 0;
  }

  if (eval_cmd->parsed()) {
    IndexHandle index;
    if (int rc = report(index.open(index_path))) return rc;
    bob_eval_options options;
    bob_eval_options_init(&options);
    options.scope = kScopes.at(scope);
    options.section = kSections.at(section);
    if (!ns.empty()) {
      options.ns = ns.data();
      options.ns_count = ns.size();
    }
    if (!groups_path.empty()) options.grouping_path = groups_path.c_str();
    options.threads = threads;
    options.pairwise_sample = pairwise;
    options.seed = seed;
    return report(bob_evaluate(index.get(), &options, out_path.c_str()));
  }

  if (pair_cmd->parsed()) {
    IndexHandle index;
    if (int rc = report(index.open(index_path))) return rc;
    std::vector<const char*> ids;
    for (const std::string& s : slides) ids.push_back(s.c_str());
    return report(bob_export_pairwise(
        index.get(), slides.empty() ? nullptr : ids.data(), ids.size(), sample,
        seed, out_path.c_str()));
  }

  if (stats_cmd->parsed()) {
    char* csv = nullptr;
    if (int rc = report(bob_catalog_stats(catalog_path.c_str(), &csv))) {
      return rc;
    }
    int rc = 0;
    if (out_path.empty()) {
      std::fputs(csv, stdout);
    } else if (std::FILE* f = std::fopen(out_path.c_str(), "wb")) {
      std::fputs(csv, f);
      if (std::fclose(f) != 0) rc = 1;
    } else {
      rc = 1;
    }
    if (rc) std::fprintf(stderr, "bobsearch: cannot write %s\n", out_path.c_str());
    bob_string_free(csv);
    return rc;
  }

  if (synth_cmd->parsed()) {
    synth.kind = kind == "images" ? BOB_SYNTH_IMAGES : BOB_SYNTH_FEATURES;
    synth.image_format = format.c_str();
    return report(bob_synth_corpus(&synth, out_path.c_str()));
  }
  return 0;
}
