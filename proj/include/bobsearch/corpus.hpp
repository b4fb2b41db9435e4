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

/// @file corpus.hpp
/// @brief Slide catalog: the metadata of every whole-slide image in an archive.
///
/// A catalog is read from a comma-delimited file whose header names the
/// columns
///
///     slide_id,patient_id,anatomic_site,subtype_code,section_type,image_path,mpp
///
/// `mpp` may be omitted, in which case every slide is taken to be scanned at
/// 20x (0.5 microns per pixel). Columns are matched by name; the order above
/// is the one the writer emits.

#ifndef BOBSEARCH_CORPUS_HPP_
#define BOBSEARCH_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bob {

enum class SectionType { kFrozen, kPermanent, kUnspecified };

std::string_view to_string(SectionType type) noexcept;

/// Parses "frozen", "permanent" or "unspecified". Throws ErrorCode::kValue.
SectionType parse_section_type(std::string_view token);

inline constexpr double kDefaultMpp = 0.5;

struct SlideRecord {
  std::string slide_id;
  std::string patient_id;
  std::string anatomic_site;
  std::string subtype_code;
  SectionType section_type = SectionType::kUnspecified;
  std::string image_path;
  double mpp = kDefaultMpp;

  bool operator==(const SlideRecord&) const = default;
};

/// Immutable set of slide records plus site and patient lookup tables.
class Catalog {
 public:
  Catalog() = default;

  /// Validates the records and builds both indices. Throws kDuplicateId on a
  /// repeated slide_id and kValue on an empty patient/subtype or mpp <= 0.
  explicit Catalog(std::vector<SlideRecord> records);

  const std::vector<SlideRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const std::map<std::string, std::vector<std::string>>& site_index()
      const noexcept {
    return site_index_;
  }
  const std::map<std::string, std::vector<std::string>>& patient_index()
      const noexcept {
    return patient_index_;
  }

  /// nullptr when the id is unknown.
  const SlideRecord* find(std::string_view slide_id) const;

 private:
  std::vector<SlideRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::string>> site_index_;
  std::map<std::string, std::vector<std::string>> patient_index_;
};

/// Reads a catalog. Row order is preserved. Errors name the offending line.
Catalog ingest_catalog(std::istream& in);
Catalog load_catalog(const std::filesystem::path& path);

void write_catalog(std::ostream& out, const Catalog& catalog);

struct SubtypeStats {
  std::string subtype_code;
  std::size_t slide_count = 0;
  std::size_t patient_count = 0;
  std::size_t frozen = 0;
  std::size_t permanent = 0;
  std::size_t unspecified = 0;

  bool operator==(const SubtypeStats&) const = default;
};

struct CatalogStats {
  std::vector<SubtypeStats> subtypes;  // sorted by subtype_code
  std::size_t slide_count = 0;
  std::size_t patient_count = 0;

  bool operator==(const CatalogStats&) const = default;
};

/// Per-subtype slide/patient counts and section split. Throws kEmptyCatalog.
CatalogStats catalog_stats(const Catalog& catalog);

void write_stats_csv(std::ostream& out, const CatalogStats& stats);

}  // namespace bob

#endif  // BOBSEARCH_CORPUS_HPP_
