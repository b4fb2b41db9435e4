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

#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bobsearch/corpus.hpp"
#include "bobsearch/error.hpp"
#include "test_support.hpp"

namespace bob {
namespace {

constexpr const char* kHeader =
    "slide_id,patient_id,anatomic_site,subtype_code,section_type,image_path\n";

ErrorCode code_of(const std::string& text) {
  std::istringstream in(text);
  try {
    ingest_catalog(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::kInvalidArgument;
}

Catalog parse(const std::string& text) {
  std::istringstream in(text);
  return ingest_catalog(in);
}

TEST(Catalog, ThreeRowsTwoPatients) {
  const Catalog c = parse(std::string(kHeader) +
                          "s1,p1,Lung,LUAD,frozen,a.png\n"
                          "s2,p1,Lung,LUAD,permanent,b.png\n"
                          "s3,p2,Lung,LUSC,permanent,c.png\n");
  EXPECT_EQ(c.size(), 3U);
  EXPECT_EQ(c.patient_index().size(), 2U);
  EXPECT_EQ(c.site_index().size(), 1U);
  EXPECT_EQ(c.patient_index().at("p1"),
            (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(c.find("s2")->section_type, SectionType::kPermanent);
  EXPECT_EQ(c.find("s1")->mpp, kDefaultMpp);
  EXPECT_EQ(c.find("nope"), nullptr);
}

TEST(Catalog, ColumnsMatchedByNameWithOptionalMpp) {
  const Catalog c = parse(
      "mpp,image_path,section_type,subtype_code,anatomic_site,patient_id,"
      "slide_id\n"
      "0.25,x.tif,unspecified,GBM,Brain,p9,s9\n");
  const SlideRecord* r = c.find("s9");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->patient_id, "p9");
  EXPECT_EQ(r->anatomic_site, "Brain");
  EXPECT_EQ(r->section_type, SectionType::kUnspecified);
  EXPECT_DOUBLE_EQ(r->mpp, 0.25);
}

TEST(Catalog, Errors) {
  EXPECT_EQ(code_of(""), ErrorCode::kSchema);
  EXPECT_EQ(code_of("slide_id,patient_id\ns1,p1\n"), ErrorCode::kSchema);
  EXPECT_EQ(code_of(std::string(kHeader) + "s1,p1,Lung\n"),
            ErrorCode::kSchema);
  EXPECT_EQ(code_of(std::string(kHeader) + "s1,p1,Lung,LUAD,fresh,a\n"),
            ErrorCode::kValue);
  EXPECT_EQ(code_of(std::string(kHeader) + "s1,,Lung,LUAD,frozen,a\n"),
            ErrorCode::kValue);
  EXPECT_EQ(code_of(std::string(kHeader) +
                    "s1,p1,Lung,LUAD,frozen,a\ns1,p2,Lung,LUAD,frozen,b\n"),
            ErrorCode::kDuplicateId);
}

TEST(Catalog, ErrorsNameTheLine) {
  std::istringstream in(std::string(kHeader) +
                        "s1,p1,Lung,LUAD,frozen,a\ns2,p1,Lung,LUAD,??,b\n");
  try {
    ingest_catalog(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos)
        << e.what();
  }
}

TEST(Catalog, WriteThenIngestRoundTrips) {
  std::vector<SlideRecord> records;
  for (int i = 0; i < 20; ++i) {
    SlideRecord r;
    r.slide_id = "s" + std::to_string(i);
    r.patient_id = "p" + std::to_string(i / 3);
    r.anatomic_site = i % 2 ? "Kidney" : "Brain";
    r.subtype_code = "T" + std::to_string(i % 4);
    r.section_type = static_cast<SectionType>(i % 3);
    r.image_path = "img/" + r.slide_id + ".png";
    r.mpp = 0.25 + i * 0.125;
    records.push_back(r);
  }
  const Catalog original(records);
  std::ostringstream out;
  write_catalog(out, original);
  EXPECT_EQ(parse(out.str()).records(), original.records());
}

TEST(Stats, SamePatientTwoSlides) {
  const Catalog c = parse(std::string(kHeader) +
                          "s1,p1,Lung,X,frozen,a\ns2,p1,Lung,X,frozen,b\n");
  const CatalogStats stats = catalog_stats(c);
  ASSERT_EQ(stats.subtypes.size(), 1U);
  EXPECT_EQ(stats.subtypes[0].slide_count, 2U);
  EXPECT_EQ(stats.subtypes[0].patient_count, 1U);
  EXPECT_EQ(stats.subtypes[0].frozen, 2U);
}

TEST(Stats, DisjointPatientsEqualSlides) {
  std::string text = kHeader;
  for (int i = 0; i < 9; ++i) {
    text += "s" + std::to_string(i) + ",p" + std::to_string(i) + ",Site,T" +
            std::to_string(i % 3) + ",permanent,x\n";
  }
  for (const SubtypeStats& s : catalog_stats(parse(text)).subtypes) {
    EXPECT_EQ(s.patient_count, s.slide_count);
  }
}

TEST(Stats, EmptyCatalogThrows) {
  try {
    catalog_stats(Catalog{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCatalog);
  }
}

TEST(Stats, RandomCatalogMatchesRecount) {
  std::mt19937_64 rng(11);
  std::vector<SlideRecord> records;
  for (int i = 0; i < 500; ++i) {
    SlideRecord r;
    r.slide_id = "s" + std::to_string(i);
    r.patient_id = "p" + std::to_string(rng() % 120);
    r.anatomic_site = "A";
    r.subtype_code = "T" + std::to_string(rng() % 7);
    r.section_type = static_cast<SectionType>(rng() % 3);
    records.push_back(r);
  }
  const CatalogStats stats = catalog_stats(Catalog(records));

  // Recount straight from the record list.
  std::map<std::string, std::set<std::string>> patients;
  std::map<std::string, std::array<std::size_t, 4>> counts;
  for (const SlideRecord& r : records) {
    patients[r.subtype_code].insert(r.patient_id);
    auto& c = counts[r.subtype_code];
    ++c[0];
    ++c[1 + static_cast<int>(r.section_type)];
  }
  ASSERT_EQ(stats.subtypes.size(), counts.size());
  for (const SubtypeStats& s : stats.subtypes) {
    const auto& c = counts.at(s.subtype_code);
    EXPECT_EQ(s.slide_count, c[0]);
    EXPECT_EQ(s.frozen, c[1]);
    EXPECT_EQ(s.permanent, c[2]);
    EXPECT_EQ(s.unspecified, c[3]);
    EXPECT_EQ(s.patient_count, patients.at(s.subtype_code).size());
  }
  EXPECT_EQ(stats.slide_count, 500U);
}

TEST(Stats, LargeCatalogPartitionIsExact) {
  // 29,120 slides: 17,425 frozen, 11,579 permanent, 116 unspecified.
  std::vector<std::size_t> order(29120);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  std::ostringstream text;
  text << "slide_id,patient_id,anatomic_site,subtype_code,section_type,"
          "image_path\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t k = order[i];
    const char* section = k < 17425           ? "frozen"
                          : k < 17425 + 11579 ? "permanent"
                                              : "unspecified";
    text << "TCGA-" << i << ",P" << i / 2 << ",Site" << i % 13 << ",T"
         << i % 32 << ',' << section << ",\n";
  }
  const Catalog c = parse(text.str());
  EXPECT_EQ(c.size(), 29120U);
  std::size_t frozen = 0, permanent = 0, unspecified = 0;
  for (const SubtypeStats& s : catalog_stats(c).subtypes) {
    frozen += s.frozen;
    permanent += s.permanent;
    unspecified += s.unspecified;
  }
  EXPECT_EQ(frozen, 17425U);
  EXPECT_EQ(permanent, 11579U);
  EXPECT_EQ(unspecified, 116U);
}

TEST(Stats, CsvLayout) {
  const Catalog c = parse(std::string(kHeader) +
                          "s1,p1,Lung,B,frozen,a\ns2,p2,Lung,A,permanent,b\n");
  std::ostringstream out;
  write_stats_csv(out, catalog_stats(c));
  EXPECT_EQ(out.str(),
            "subtype_code,wsi_count,patient_count,frozen,permanent,"
            "unspecified\nA,1,1,0,1,0\nB,1,1,1,0,0\n");
}

TEST(Catalog, LoadMissingFileIsIoError) {
  testing::TempDir dir;
  try {
    load_catalog(dir / "absent.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace bob
