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

#include "bobsearch/index.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "bobsearch/error.hpp"
#include "checksum.hpp"
#include "parallel.hpp"

namespace bob {

namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'B', 'O', 'B', 'I',
                                                'D', 'X', '1', '\0'};
constexpr std::size_t kHeaderSize = 8 + 4 + 4 + 8;
constexpr std::size_t kChecksumSize = 8;

class Writer {
 public:
  void bytes(std::span<const std::uint8_t> data) {
    out_.insert(out_.end(), data.begin(), data.end());
  }
  template <typename T>
  void le(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(u & 0xFFU));
      if constexpr (sizeof(T) > 1) u = static_cast<U>(u >> 8);
    }
  }
  void str(std::string_view s) {
    le<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u = static_cast<U>(u | static_cast<U>(static_cast<U>(data_[pos_ + i])
                                            << (8 * i)));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::string str() {
    const auto length = le<std::uint32_t>();
    need(length);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), length);
    pos_ += length;
    return s;
  }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) {
      fail(ErrorCode::kCorruptIndex, "index file is truncated");
    }
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace

Index::Index(std::uint32_t width, std::vector<SlideIndexEntry> entries)
    : width_(width), entries_(std::move(entries)) {
  by_id_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const SlideIndexEntry& e = entries_[i];
    if (e.bunch.empty()) {
      fail(ErrorCode::kEmptyInput, "slide " + e.slide_id + " has no barcodes");
    }
    if (e.bunch.width() != width_) {
      fail(ErrorCode::kDimension,
           "slide " + e.slide_id + ": barcode width " +
               std::to_string(e.bunch.width()) + " differs from index width " +
               std::to_string(width_));
    }
    if (!by_id_.emplace(e.slide_id, i).second) {
      fail(ErrorCode::kDuplicateId, "duplicate slide_id " + e.slide_id);
    }
  }
}

std::size_t Index::total_barcodes() const noexcept {
  std::size_t total = 0;
  for (const auto& e : entries_) total += e.bunch.size();
  return total;
}

const SlideIndexEntry* Index::find(std::string_view slide_id) const {
  const auto it = by_id_.find(std::string(slide_id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

Index build_index(const Catalog& catalog,
                  std::map<std::string, BunchOfBarcodes> bunches) {
  std::vector<SlideIndexEntry> entries;
  entries.reserve(catalog.size());
  std::optional<std::uint32_t> width;
  for (const SlideRecord& r : catalog.records()) {
    auto it = bunches.find(r.slide_id);
    if (it == bunches.end()) {
      fail(ErrorCode::kMissingSlide, "no barcodes for slide " + r.slide_id);
    }
    if (!width) width = it->second.width();
    SlideIndexEntry e;
    e.slide_id = r.slide_id;
    e.patient_id = r.patient_id;
    e.anatomic_site = r.anatomic_site;
    e.subtype_code = r.subtype_code;
    e.section_type = r.section_type;
    e.bunch = std::move(it->second);
    entries.push_back(std::move(e));
  }
  return Index(width.value_or(0), std::move(entries));
}

std::vector<std::uint8_t> serialize_index(const Index& index) {
  Writer w;
  w.bytes(kMagic);
  w.le<std::uint32_t>(kIndexFormatVersion);
  w.le<std::uint32_t>(index.width());
  w.le<std::uint64_t>(index.size());
  for (const SlideIndexEntry& e : index.entries()) {
    w.str(e.slide_id);
    w.str(e.patient_id);
    w.str(e.anatomic_site);
    w.str(e.subtype_code);
    w.str(to_string(e.section_type));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(e.bunch.size()));
    for (std::size_t i = 0; i < e.bunch.size(); ++i) {
      w.le<std::int32_t>(e.bunch.origin(i).x);
      w.le<std::int32_t>(e.bunch.origin(i).y);
      for (std::uint64_t word : e.bunch.barcode(i).words) w.le(word);
    }
  }
  const std::uint64_t checksum = detail::crc64(w.buffer());
  w.le<std::uint64_t>(checksum);
  return std::move(w.buffer());
}

Index deserialize_index(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_seen = std::min(bytes.size(), kMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + magic_seen, kMagic.begin())) {
    fail(ErrorCode::kFormat, "not an index file (bad magic)");
  }
  if (bytes.size() < kHeaderSize + kChecksumSize) {
    fail(ErrorCode::kCorruptIndex, "index file is truncated");
  }
  const auto body = bytes.first(bytes.size() - kChecksumSize);
  Reader trailer(bytes.last(kChecksumSize));
  if (trailer.le<std::uint64_t>() != detail::crc64(body)) {
    fail(ErrorCode::kCorruptIndex, "index checksum mismatch");
  }

  Reader r(body.subspan(kMagic.size()));
  const auto version = r.le<std::uint32_t>();
  if (version != kIndexFormatVersion) {
    fail(ErrorCode::kFormat,
         "unsupported index format version " + std::to_string(version));
  }
  const auto width = r.le<std::uint32_t>();
  const auto count = r.le<std::uint64_t>();
  const std::size_t stride = words_for_bits(width);
  if (count > 0 && (width == 0 || stride * 8 > r.remaining())) {
    fail(ErrorCode::kCorruptIndex, "barcode width inconsistent with file size");
  }
  const std::uint64_t pad_mask =
      width % 64 == 0 ? 0 : ~std::uint64_t{0} << (width % 64);

  std::vector<SlideIndexEntry> entries;
  for (std::uint64_t n = 0; n < count; ++n) {
    SlideIndexEntry e;
    e.slide_id = r.str();
    e.patient_id = r.str();
    e.anatomic_site = r.str();
    e.subtype_code = r.str();
    try {
      e.section_type = parse_section_type(r.str());
    } catch (const Error&) {
      fail(ErrorCode::kCorruptIndex,
           "slide " + e.slide_id + ": invalid section type");
    }
    const auto barcodes = r.le<std::uint32_t>();
    if (barcodes == 0) {
      fail(ErrorCode::kCorruptIndex, "slide " + e.slide_id + " has no barcodes");
    }
    e.bunch = BunchOfBarcodes(e.slide_id, width);
    std::vector<std::uint64_t> words(stride);
    for (std::uint32_t b = 0; b < barcodes; ++b) {
      PatchCoord origin;
      origin.x = r.le<std::int32_t>();
      origin.y = r.le<std::int32_t>();
      for (auto& word : words) word = r.le<std::uint64_t>();
      if (stride > 0 && (words.back() & pad_mask) != 0) {
        fail(ErrorCode::kCorruptIndex,
             "slide " + e.slide_id + ": non-zero barcode padding");
      }
      e.bunch.add_words(words, origin);
    }
    entries.push_back(std::move(e));
  }
  if (r.remaining() != 0) {
    fail(ErrorCode::kCorruptIndex, "trailing bytes after the last entry");
  }
  try {
    return Index(width, std::move(entries));
  } catch (const Error& e) {
    fail(ErrorCode::kCorruptIndex, e.what());
  }
}

void save_index(const Index& index, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create index file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "failed writing index file " + path.string());
}

Index load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open index file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

std::vector<SearchHit> search(const Index& index, std::string_view query_slide_id,
                              std::size_t n, const SearchOptions& options) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  const SlideIndexEntry* query = index.find(query_slide_id);
  if (!query) {
    fail(ErrorCode::kNotFound,
         "slide " + std::string(query_slide_id) + " is not in the index");
  }
  const std::string& site =
      options.site.empty() ? query->anatomic_site : options.site;

  std::vector<const SlideIndexEntry*> candidates;
  for (const SlideIndexEntry& e : index.entries()) {
    if (e.patient_id == query->patient_id) continue;
    if (options.scope == Scope::kVertical && e.anatomic_site != site) continue;
    if (options.section && e.section_type != *options.section) continue;
    candidates.push_back(&e);
  }

  std::vector<double> distances(candidates.size());
  detail::parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
    distances[i] = bob_distance(query->bunch, candidates[i]->bunch);
  });

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (distances[a] != distances[b]) {
                        return distances[a] < distances[b];
                      }
                      return candidates[a]->slide_id < candidates[b]->slide_id;
                    });

  std::vector<SearchHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const SlideIndexEntry& e = *candidates[order[i]];
    hits.push_back({e.slide_id, e.subtype_code, e.patient_id, distances[order[i]]});
  }
  return hits;
}

std::vector<std::vector<double>> pairwise_distances(
    const Index& index, std::span<const std::string> slide_ids) {
  std::vector<const SlideIndexEntry*> entries;
  for (const std::string& id : slide_ids) {
    const SlideIndexEntry* e = index.find(id);
    if (!e) fail(ErrorCode::kNotFound, "slide " + id + " is not in the index");
    entries.push_back(e);
  }
  std::vector<std::vector<double>> m(entries.size(),
                                     std::vector<double>(entries.size(), 0.0));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (i != j) m[i][j] = bob_distance(entries[i]->bunch, entries[j]->bunch);
    }
  }
  return m;
}

}  // namespace bob
