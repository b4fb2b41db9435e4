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

#include "bobsearch/corpus.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "bobsearch/error.hpp"
#include "csv.hpp"

namespace bob {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "slide_id",     "patient_id", "anatomic_site", "subtype_code",
    "section_type", "image_path", "mpp"};
constexpr std::size_t kMppColumn = 6;

std::string row_context(std::size_t line) {
  return "catalog line " + std::to_string(line) + ": ";
}

}  // namespace

std::string_view to_string(SectionType type) noexcept {
  switch (type) {
    case SectionType::kFrozen:
      return "frozen";
    case SectionType::kPermanent:
      return "permanent";
    case SectionType::kUnspecified:
      return "unspecified";
  }
  return "unspecified";
}

SectionType parse_section_type(std::string_view token) {
  if (token == "frozen") return SectionType::kFrozen;
  if (token == "permanent") return SectionType::kPermanent;
  if (token == "unspecified") return SectionType::kUnspecified;
  fail(ErrorCode::kValue,
       "unknown section_type '" + std::string(token) + "'");
}

Catalog::Catalog(std::vector<SlideRecord> records)
    : records_(std::move(records)) {
  by_id_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const SlideRecord& r = records_[i];
    if (r.slide_id.empty()) fail(ErrorCode::kValue, "empty slide_id");
    if (r.patient_id.empty()) {
      fail(ErrorCode::kValue, "slide " + r.slide_id + ": empty patient_id");
    }
    if (r.subtype_code.empty()) {
      fail(ErrorCode::kValue, "slide " + r.slide_id + ": empty subtype_code");
    }
    if (!(r.mpp > 0.0) || !std::isfinite(r.mpp)) {
      fail(ErrorCode::kValue, "slide " + r.slide_id + ": mpp must be > 0");
    }
    if (!by_id_.emplace(r.slide_id, i).second) {
      fail(ErrorCode::kDuplicateId, "duplicate slide_id " + r.slide_id);
    }
    site_index_[r.anatomic_site].push_back(r.slide_id);
    patient_index_[r.patient_id].push_back(r.slide_id);
  }
}

const SlideRecord* Catalog::find(std::string_view slide_id) const {
  const auto it = by_id_.find(std::string(slide_id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

Catalog ingest_catalog(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::is_blank(line)) break;
  }
  if (line_no == 0 || detail::is_blank(line)) {
    fail(ErrorCode::kSchema, "catalog has no header row");
  }

  const auto header = detail::split_csv_line(line);
  std::array<int, kColumns.size()> position;
  position.fill(-1);
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      if (header[i] == kColumns[c]) position[c] = static_cast<int>(i);
    }
  }
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (position[c] < 0 && c != kMppColumn) {
      fail(ErrorCode::kSchema,
           "catalog header is missing column '" + std::string(kColumns[c]) +
               "'");
    }
  }

  std::vector<SlideRecord> records;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < header.size()) {
      fail(ErrorCode::kSchema, row_context(line_no) + "expected " +
                                   std::to_string(header.size()) +
                                   " fields, found " +
                                   std::to_string(fields.size()));
    }
    auto field = [&](std::size_t column) -> const std::string& {
      return fields[static_cast<std::size_t>(position[column])];
    };

    SlideRecord record;
    record.slide_id = field(0);
    record.patient_id = field(1);
    record.anatomic_site = field(2);
    record.subtype_code = field(3);
    try {
      record.section_type = parse_section_type(field(4));
    } catch (const Error& e) {
      fail(ErrorCode::kValue, row_context(line_no) + e.what());
    }
    record.image_path = field(5);
    if (position[kMppColumn] >= 0) {
      const auto mpp = detail::parse_double(field(kMppColumn));
      if (!mpp || !(*mpp > 0.0) || !std::isfinite(*mpp)) {
        fail(ErrorCode::kValue, row_context(line_no) + "invalid mpp '" +
                                    field(kMppColumn) + "'");
      }
      record.mpp = *mpp;
    }
    if (record.slide_id.empty() || record.patient_id.empty() ||
        record.subtype_code.empty()) {
      fail(ErrorCode::kValue,
           row_context(line_no) +
               "slide_id, patient_id and subtype_code must be non-empty");
    }
    if (!seen.insert(record.slide_id).second) {
      fail(ErrorCode::kDuplicateId, row_context(line_no) +
                                        "duplicate slide_id " +
                                        record.slide_id);
    }
    records.push_back(std::move(record));
  }
  return Catalog(std::move(records));
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open catalog " + path.string());
  return ingest_catalog(in);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    out << (c ? "," : "") << kColumns[c];
  }
  out << '\n';
  for (const SlideRecord& r : catalog.records()) {
    out << r.slide_id << ',' << r.patient_id << ',' << r.anatomic_site << ','
        << r.subtype_code << ',' << to_string(r.section_type) << ','
        << r.image_path << ',' << detail::format_g9(r.mpp) << '\n';
  }
}

CatalogStats catalog_stats(const Catalog& catalog) {
  if (catalog.empty()) fail(ErrorCode::kEmptyCatalog, "catalog is empty");

  std::map<std::string, SubtypeStats> by_subtype;
  std::map<std::string, std::set<std::string>> patients;
  for (const SlideRecord& r : catalog.records()) {
    SubtypeStats& s = by_subtype[r.subtype_code];
    s.subtype_code = r.subtype_code;
    ++s.slide_count;
    switch (r.section_type) {
      case SectionType::kFrozen:
        ++s.frozen;
        break;
      case SectionType::kPermanent:
        ++s.permanent;
        break;
      case SectionType::kUnspecified:
        ++s.unspecified;
        break;
    }
    patients[r.subtype_code].insert(r.patient_id);
  }

  CatalogStats stats;
  for (auto& [code, s] : by_subtype) {
    s.patient_count = patients[code].size();
    stats.subtypes.push_back(s);
  }
  stats.slide_count = catalog.size();
  stats.patient_count = catalog.patient_index().size();
  return stats;
}

void write_stats_csv(std::ostream& out, const CatalogStats& stats) {
  out << "subtype_code,wsi_count,patient_count,frozen,permanent,unspecified\n";
  for (const SubtypeStats& s : stats.subtypes) {
    out << s.subtype_code << ',' << s.slide_count << ',' << s.patient_count
        << ',' << s.frozen << ',' << s.permanent << ',' << s.unspecified
        << '\n';
  }
}

}  // namespace bob
