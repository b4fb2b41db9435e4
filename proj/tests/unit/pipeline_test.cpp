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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "bobsearch/error.hpp"
#include "bobsearch/pipeline.hpp"
#include "bobsearch/synth.hpp"
#include "test_support.hpp"

namespace bob {
namespace {

using nlohmann::json;

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

RunConfig seeded(std::uint64_t seed = 1) {
  RunConfig c;
  c.seed = seed;
  return c;
}

TEST(Config, JsonOverridesDefaults) {
  RunConfig c;
  apply_config_json(json::parse(R"({"k": 4, "selection_fraction": 0.3,
                                    "seed": 77, "patch_size_um": 250,
                                    "threads": 3})"),
                    c);
  EXPECT_EQ(c.k, 4);
  EXPECT_EQ(c.selection_fraction, 0.3);
  EXPECT_EQ(c.seed, 77U);
  EXPECT_EQ(c.patch.physical_size_um, 250.0);
  EXPECT_EQ(c.threads, 3U);
  EXPECT_NO_THROW(c.validate());
  EXPECT_FALSE(config_to_json(c).contains("threads"));
}

TEST(Config, Errors) {
  RunConfig c;
  EXPECT_EQ(error_of([&] { apply_config_json(json::parse(R"({"kk": 1})"), c); }),
            ErrorCode::kSchema);
  EXPECT_EQ(error_of([&] { apply_config_json(json::parse(R"({"k": "x"})"), c); }),
            ErrorCode::kSchema);
  EXPECT_EQ(error_of([&] { apply_config_json(json::parse("[1]"), c); }),
            ErrorCode::kSchema);
  EXPECT_EQ(error_of([] { RunConfig{}.validate(); }),
            ErrorCode::kInvalidArgument);
  RunConfig bad = seeded();
  bad.selection_fraction = 0;
  EXPECT_EQ(error_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
  testing::TempDir dir;
  testing::write_text(dir / "c.json", "{not json");
  EXPECT_EQ(error_of([&] { apply_config_file(dir / "c.json", c); }),
            ErrorCode::kSchema);
  EXPECT_EQ(error_of([&] { apply_config_file(dir / "none.json", c); }),
            ErrorCode::kIo);
}

TEST(IndexSlide, DeterministicAndSized) {
  SlideImageSpec spec;
  spec.grid = 16;
  const RgbImage image = synth_slide_image("T00", 9, spec);
  SlideRecord record;
  record.slide_id = "a";
  record.mpp = synthetic_mpp(spec);
  const auto first = index_slide(record, image.view(), seeded(5));
  const auto again = index_slide(record, image.view(), seeded(5));
  EXPECT_EQ(first.bunch, again.bunch);
  EXPECT_EQ(first.mosaic, again.mosaic);
  EXPECT_EQ(first.bunch.width(), 1023U);
  EXPECT_EQ(first.bunch.size(), first.mosaic.patches.size());
  EXPECT_GT(first.tissue_patch_count, 0U);
  EXPECT_LE(first.bunch.size(), first.tissue_patch_count);
  std::set<std::pair<int, int>> seen;
  for (const auto& p : first.mosaic.patches) {
    EXPECT_TRUE(seen.emplace(p.x, p.y).second);
  }
}

TEST(IndexSlide, BlankSlideIsEmptyInput) {
  RgbImage white(200, 200);
  for (auto& v : white.pixels) v = 255;
  SlideRecord record;
  record.slide_id = "w";
  record.mpp = 2.5;
  EXPECT_EQ(error_of([&] { index_slide(record, white.view(), seeded()); }),
            ErrorCode::kEmptyInput);
}

TEST(Features, BunchesGroupBySlide) {
  const std::vector<FeatureVector> v = {{"a", {0, 0}, {1, 2, 3}},
                                        {"b", {0, 0}, {3, 2, 1}},
                                        {"a", {1, 0}, {1, 1, 1}}};
  const auto bunches = bunches_from_features(v);
  ASSERT_EQ(bunches.size(), 2U);
  EXPECT_EQ(bunches.at("a").size(), 2U);
  EXPECT_EQ(bunches.at("a").width(), 2U);
  const std::vector<FeatureVector> mixed = {{"a", {0, 0}, {1, 2, 3}},
                                            {"b", {0, 0}, {1, 2}}};
  EXPECT_EQ(error_of([&] { bunches_from_features(mixed); }),
            ErrorCode::kDimension);
}

class CorpusTest : public ::testing::Test {
 protected:
  static CatalogSpec small_catalog(const std::string& ext) {
    CatalogSpec spec;
    spec.subtypes = simple_subtypes(2, 2, 3);
    spec.max_slides_per_patient = 1;
    spec.image_extension = ext;
    spec.seed = 4;
    return spec;
  }
  static SlideImageSpec small_image() {
    SlideImageSpec s;
    s.grid = 12;
    s.min_tissue_patches = 70;
    s.max_tissue_patches = 90;
    return s;
  }
  testing::TempDir dir_;
};

TEST_F(CorpusTest, ImageCorpusIndexesEverySlide) {
  const Catalog catalog =
      write_image_corpus(dir_.path(), small_catalog(".png"), small_image());
  RunConfig config = seeded(3);
  config.threads = 3;
  const IndexBuild build = cmd_index(dir_ / "catalog.csv", config,
                                     dir_ / "idx.bob", dir_ / "m.json",
                                     dir_ / "mosaics");
  EXPECT_EQ(build.index.size(), catalog.size());
  EXPECT_EQ(load_index(dir_ / "idx.bob"), build.index);
  std::ifstream in(dir_ / "m.json");
  const json manifest = json::parse(in);
  EXPECT_EQ(manifest["entry_count"], catalog.size());
  EXPECT_EQ(manifest["barcode_width"], 1023);
  EXPECT_EQ(manifest["config"]["seed"], 3);
  EXPECT_EQ(manifest["slides"].size(), catalog.size());
  for (const auto& r : catalog.records()) {
    EXPECT_TRUE(std::filesystem::exists(dir_ / "mosaics" / (r.slide_id + ".json")));
  }

  config.threads = 1;
  const IndexBuild serial =
      build_catalog_index(catalog, dir_.path(), config);
  EXPECT_EQ(serialize_index(serial.index), serialize_index(build.index));
}

TEST_F(CorpusTest, TiffCorpusMatchesPng) {
  testing::TempDir other;
  write_image_corpus(dir_.path(), small_catalog(".png"), small_image());
  write_image_corpus(other.path(), small_catalog(".tif"), small_image());
  const auto a = cmd_index(dir_ / "catalog.csv", seeded(), dir_ / "i.bob");
  const auto b = cmd_index(other / "catalog.csv", seeded(), other / "i.bob");
  EXPECT_EQ(a.index, b.index);
}

TEST_F(CorpusTest, MissingImageNamesSlide) {
  const Catalog catalog =
      write_image_corpus(dir_.path(), small_catalog(".png"), small_image());
  const SlideRecord& victim = catalog.records()[2];
  std::filesystem::remove(dir_ / victim.image_path);
  try {
    cmd_index(dir_ / "catalog.csv", seeded(), dir_ / "i.bob");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(victim.slide_id), std::string::npos);
  }
  EXPECT_FALSE(std::filesystem::exists(dir_ / "i.bob"));
}

TEST_F(CorpusTest, FeatureCorpusIndexes) {
  FeatureCorpusSpec spec;
  spec.catalog = small_catalog("");
  spec.dim = 64;
  spec.patches_per_slide = 7;
  const Catalog catalog = write_feature_corpus(dir_.path(), spec);
  RunConfig config = seeded();
  config.features = (dir_ / "features.csv").string();
  const auto build = cmd_index(dir_ / "catalog.csv", config, dir_ / "i.bob");
  EXPECT_EQ(build.index.size(), catalog.size());
  EXPECT_EQ(build.index.width(), 63U);
  EXPECT_EQ(build.index.total_barcodes(), 7 * catalog.size());
  const FeatureCorpus memory = make_feature_corpus(spec);
  EXPECT_EQ(build.index, build_index(memory.catalog, memory.bunches));
}

TEST_F(CorpusTest, EvaluateWritesAllOutputs) {
  FeatureCorpusSpec spec;
  spec.catalog = small_catalog("");
  spec.catalog.subtypes = simple_subtypes(4, 2, 4);
  spec.dim = 128;
  spec.patches_per_slide = 12;
  const FeatureCorpus corpus = make_feature_corpus(spec);
  const Index index = build_index(corpus.catalog, corpus.bunches);
  EvalConfig config;
  EvaluateOutputs outputs;
  outputs.pairwise_sample = 5;
  outputs.seed = 8;
  cmd_evaluate(index, config, dir_ / "out", outputs);
  for (const char* name : {"report.csv", "report_full.csv", "summary.csv",
                           "confusion.csv", "heatmap.csv", "chord.csv",
                           "pairwise.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / name)) << name;
  }
  const std::string pairwise = testing::read_file(dir_ / "out" / "pairwise.csv");
  EXPECT_EQ(std::count(pairwise.begin(), pairwise.end(), '\n'), 6);
}

TEST(Sampling, DeterministicDistinctAndBounded) {
  const Index index =
      testing::to_index(testing::random_corpus(40, 50, 20, 1, 16));
  const auto a = sample_slide_ids(index, 10, 99);
  EXPECT_EQ(a, sample_slide_ids(index, 10, 99));
  EXPECT_NE(a, sample_slide_ids(index, 10, 100));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 10U);
  EXPECT_EQ(sample_slide_ids(index, 500, 1).size(), 50U);
}

TEST(Grouping, ParsesAndRejects) {
  testing::TempDir dir;
  testing::write_text(dir / "g.csv", "subtype_code,group\nGBM,Brain\nLGG,Brain\n");
  EXPECT_EQ(load_grouping(dir / "g.csv"),
            (std::map<std::string, std::string>{{"GBM", "Brain"},
                                                {"LGG", "Brain"}}));
  testing::write_text(dir / "dup.csv", "subtype_code,group\nA,X\nA,Y\n");
  EXPECT_EQ(error_of([&] { load_grouping(dir / "dup.csv"); }),
            ErrorCode::kDuplicateId);
  testing::write_text(dir / "hdr.csv", "code,group\nA,X\n");
  EXPECT_EQ(error_of([&] { load_grouping(dir / "hdr.csv"); }),
            ErrorCode::kSchema);
}

TEST(Pairwise, CsvLayout) {
  std::ostringstream out;
  const std::vector<std::string> ids = {"a", "b"};
  write_pairwise_csv(out, ids, {{0, 1.5}, {2, 0}});
  EXPECT_EQ(out.str(), "slide_id,a,b\na,0,1.5\nb,2,0\n");
}

}  // namespace
}  // namespace bob
