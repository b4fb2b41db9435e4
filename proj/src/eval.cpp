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

#include "bobsearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "bobsearch/error.hpp"
#include "bobsearch/stats.hpp"
#include "csv.hpp"
#include "parallel.hpp"

namespace bob {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool passes(SectionFilter filter, SectionType type) {
  switch (filter) {
    case SectionFilter::kAll:
      return true;
    case SectionFilter::kFrozen:
      return type == SectionType::kFrozen;
    case SectionFilter::kPermanent:
      return type == SectionType::kPermanent;
  }
  return false;
}

std::optional<SectionType> candidate_section(SectionFilter filter) {
  switch (filter) {
    case SectionFilter::kFrozen:
      return SectionType::kFrozen;
    case SectionFilter::kPermanent:
      return SectionType::kPermanent;
    case SectionFilter::kAll:
      break;
  }
  return std::nullopt;
}

std::string format_accuracy(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::size_t label_position(const std::vector<std::string>& labels,
                           const std::string& label) {
  return static_cast<std::size_t>(
      std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
}

}  // namespace

std::string_view to_string(SectionFilter filter) noexcept {
  switch (filter) {
    case SectionFilter::kAll:
      return "all";
    case SectionFilter::kFrozen:
      return "frozen";
    case SectionFilter::kPermanent:
      return "permanent";
  }
  return "all";
}

std::string_view to_string(Scope scope) noexcept {
  return scope == Scope::kVertical ? "vertical" : "horizontal";
}

bool top_n_success(const QueryResult& result, std::size_t n) {
  const std::size_t depth = std::min(n, result.hits.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (result.hits[i].subtype_code == result.true_label) return true;
  }
  return false;
}

std::optional<std::string> majority_vote(const QueryResult& result,
                                         std::size_t n) {
  struct Tally {
    std::size_t votes = 0;
    double distance = 0.0;
    std::size_t first_rank = 0;
  };
  const std::size_t depth = std::min(n, result.hits.size());
  if (depth == 0) return std::nullopt;

  std::map<std::string, Tally> tally;
  for (std::size_t i = 0; i < depth; ++i) {
    const SearchHit& hit = result.hits[i];
    auto [it, inserted] = tally.try_emplace(hit.subtype_code);
    if (inserted) it->second.first_rank = i;
    ++it->second.votes;
    it->second.distance += hit.distance;
  }

  const std::string* winner = nullptr;
  const Tally* best = nullptr;
  for (const auto& [label, t] : tally) {
    const bool better =
        !best || t.votes > best->votes ||
        (t.votes == best->votes &&
         (t.distance < best->distance ||
          (t.distance == best->distance && t.first_rank < best->first_rank)));
    if (better) {
      winner = &label;
      best = &t;
    }
  }
  return *winner;
}

bool majority_success(const QueryResult& result, std::size_t n) {
  const auto vote = majority_vote(result, n);
  return vote && *vote == result.true_label;
}

double LabelRow::best_majority() const {
  double best = 0.0;
  for (const auto& [n, accuracy] : majority_accuracy) {
    best = std::max(best, accuracy);
  }
  return best;
}

Evaluation evaluate(const Index& index, const EvalConfig& config) {
  if (index.empty()) fail(ErrorCode::kEmptyCatalog, "index is empty");
  std::vector<std::size_t> ns = config.ns;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty() || ns.front() == 0) {
    fail(ErrorCode::kInvalidArgument, "evaluation n values must be >= 1");
  }
  const std::size_t depth = ns.back();

  auto label_of = [&](const std::string& subtype) -> const std::string& {
    if (config.scope == Scope::kHorizontal) {
      const auto it = config.grouping.find(subtype);
      if (it != config.grouping.end()) return it->second;
    }
    return subtype;
  };

  std::map<std::string, std::set<std::string>> site_subtypes;
  std::vector<const SlideIndexEntry*> pool;
  for (const SlideIndexEntry& e : index.entries()) {
    if (!passes(config.section, e.section_type)) continue;
    pool.push_back(&e);
    site_subtypes[e.anatomic_site].insert(e.subtype_code);
  }

  Evaluation out;
  EvalReport& report = out.report;
  report.scope = config.scope;
  report.section = config.section;
  report.ns = ns;

  std::set<std::string> eligible_sites;
  for (const auto& [site, subtypes] : site_subtypes) {
    if (config.scope == Scope::kHorizontal || subtypes.size() >= 2) {
      eligible_sites.insert(site);
    } else {
      report.excluded_sites.push_back(site);
    }
  }

  std::vector<const SlideIndexEntry*> queries;
  for (const SlideIndexEntry* e : pool) {
    if (!eligible_sites.contains(e->anatomic_site)) continue;
    queries.push_back(e);
    if (config.scope == Scope::kHorizontal) {
      ++out.slide_counts[label_of(e->subtype_code)];
    }
  }
  if (config.scope == Scope::kVertical) {
    for (const SlideIndexEntry* e : pool) {
      if (eligible_sites.contains(e->anatomic_site)) {
        ++out.slide_counts[e->subtype_code];
      }
    }
  }
  if (queries.empty()) {
    fail(ErrorCode::kEmptyCatalog, "no slides to evaluate after filtering");
  }

  SearchOptions options;
  options.scope = config.scope;
  options.section = candidate_section(config.section);

  out.results.resize(queries.size());
  auto run = [&](std::size_t i) {
    const SlideIndexEntry& q = *queries[i];
    QueryResult& r = out.results[i];
    r.query_slide_id = q.slide_id;
    r.query_patient_id = q.patient_id;
    r.true_label = label_of(q.subtype_code);
    r.hits = search(index, q.slide_id, depth, options);
    for (SearchHit& hit : r.hits) {
      if (hit.patient_id == q.patient_id) {
        throw std::logic_error("search returned a hit of the query's patient");
      }
      hit.subtype_code = label_of(hit.subtype_code);
    }
  };
  detail::parallel_for(queries.size(), config.threads, run);
  report.query_count = queries.size();

  struct Accumulator {
    std::size_t queries = 0;
    std::set<std::string> patients;
    std::map<std::size_t, std::size_t> top_hits;
    std::map<std::size_t, std::size_t> majority_hits;
  };
  std::map<std::string, Accumulator> by_label;
  for (const QueryResult& r : out.results) {
    Accumulator& a = by_label[r.true_label];
    ++a.queries;
    a.patients.insert(r.query_patient_id);
    for (std::size_t n : ns) {
      a.top_hits[n] += top_n_success(r, n) ? 1 : 0;
      a.majority_hits[n] += majority_success(r, n) ? 1 : 0;
    }
  }
  for (const auto& [label, a] : by_label) {
    LabelRow row;
    row.label = label;
    row.wsi_count = a.queries;
    row.patient_count = a.patients.size();
    const double total = static_cast<double>(a.queries);
    for (std::size_t n : ns) {
      row.top_accuracy[n] =
          100.0 * static_cast<double>(a.top_hits.at(n)) / total;
      row.majority_accuracy[n] =
          100.0 * static_cast<double>(a.majority_hits.at(n)) / total;
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<double> patients;
  std::vector<double> best;
  for (const LabelRow& row : report.rows) {
    patients.push_back(static_cast<double>(row.patient_count));
    best.push_back(row.best_majority());
  }
  try {
    report.correlation = pearson(patients, best);
  } catch (const Error&) {
    report.correlation = kNaN;
  }

  const std::size_t trend_n =
      std::find(ns.begin(), ns.end(), std::size_t{10}) != ns.end() ? 10
                                                                   : ns.back();
  std::vector<const LabelRow*> ordered;
  for (const LabelRow& row : report.rows) ordered.push_back(&row);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const LabelRow* a, const LabelRow* b) {
                     return a->patient_count < b->patient_count;
                   });
  std::vector<double> trend;
  for (const LabelRow* row : ordered) {
    trend.push_back(row->majority_accuracy.at(trend_n));
  }
  try {
    report.trend_p_increasing =
        cox_stuart(trend, TrendAlternative::kIncreasing).p_value;
    report.trend_p_decreasing =
        cox_stuart(trend, TrendAlternative::kDecreasing).p_value;
  } catch (const Error&) {
    report.trend_p_increasing = kNaN;
    report.trend_p_decreasing = kNaN;
  }
  return out;
}

LabeledMatrix confusion_frequency(std::span<const QueryResult> results,
                                  std::size_t n) {
  if (results.empty()) {
    fail(ErrorCode::kEmptyInput, "confusion matrix needs at least one query");
  }
  std::set<std::string> label_set;
  for (const QueryResult& r : results) {
    label_set.insert(r.true_label);
    const std::size_t depth = std::min(n, r.hits.size());
    for (std::size_t i = 0; i < depth; ++i) {
      label_set.insert(r.hits[i].subtype_code);
    }
  }
  LabeledMatrix m;
  m.labels.assign(label_set.begin(), label_set.end());
  m.values.assign(m.labels.size(), std::vector<double>(m.labels.size(), 0.0));
  for (const QueryResult& r : results) {
    const std::size_t row = label_position(m.labels, r.true_label);
    const std::size_t depth = std::min(n, r.hits.size());
    for (std::size_t i = 0; i < depth; ++i) {
      m.values[row][label_position(m.labels, r.hits[i].subtype_code)] += 1.0;
    }
  }
  return m;
}

LabeledMatrix rescale_heatmap(const LabeledMatrix& m,
                              const std::map<std::string, std::size_t>& counts) {
  LabeledMatrix out = m;
  for (std::size_t j = 0; j < m.labels.size(); ++j) {
    const auto it = counts.find(m.labels[j]);
    if (it == counts.end() || it->second == 0) {
      fail(ErrorCode::kDivision,
           "no slide count for heatmap column " + m.labels[j]);
    }
    for (auto& row : out.values) row[j] /= static_cast<double>(it->second);
  }
  return out;
}

LabeledMatrix chord_matrix(std::span<const QueryResult> results,
                           std::size_t n) {
  LabeledMatrix m = confusion_frequency(results, n);
  for (std::size_t i = 0; i < m.labels.size(); ++i) m.values[i][i] = 0.0;
  return m;
}

void write_matrix_csv(std::ostream& out, const LabeledMatrix& m) {
  out << "label";
  for (const std::string& label : m.labels) out << ',' << label;
  out << '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out << m.labels[i];
    for (double v : m.values[i]) out << ',' << detail::format_g9(v);
    out << '\n';
  }
}

void write_report_csv(std::ostream& out, const EvalReport& report, bool full) {
  std::vector<std::size_t> top_columns;
  std::vector<std::size_t> majority_columns;
  auto has = [&](std::size_t n) {
    return std::find(report.ns.begin(), report.ns.end(), n) != report.ns.end();
  };
  if (full) {
    top_columns.assign(report.ns.rbegin(), report.ns.rend());
    majority_columns = report.ns;
  } else if (report.scope == Scope::kHorizontal) {
    for (std::size_t n : {10, 5, 3}) {
      if (has(n)) top_columns.push_back(n);
    }
    for (std::size_t n : {5, 10}) {
      if (has(n)) majority_columns.push_back(n);
    }
  } else {
    majority_columns = report.ns;
  }

  out << "Tumor Type,WSI Count,Patient Count";
  for (std::size_t n : top_columns) out << ",Top-" << n;
  for (std::size_t n : majority_columns) out << ",Majority-" << n;
  out << '\n';
  for (const LabelRow& row : report.rows) {
    out << row.label << ',' << row.wsi_count << ',' << row.patient_count;
    for (std::size_t n : top_columns) {
      out << ',' << format_accuracy(row.top_accuracy.at(n));
    }
    for (std::size_t n : majority_columns) {
      out << ',' << format_accuracy(row.majority_accuracy.at(n));
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
  out << "key,value\n";
  out << "scope," << to_string(report.scope) << '\n';
  out << "section," << to_string(report.section) << '\n';
  out << "queries," << report.query_count << '\n';
  out << "labels," << report.rows.size() << '\n';
  out << "correlation," << detail::format_g9(report.correlation) << '\n';
  out << "cox_stuart_p_increasing,"
      << detail::format_g9(report.trend_p_increasing) << '\n';
  out << "cox_stuart_p_decreasing,"
      << detail::format_g9(report.trend_p_decreasing) << '\n';
  out << "excluded_sites,";
  for (std::size_t i = 0; i < report.excluded_sites.size(); ++i) {
    out << (i ? ";" : "") << report.excluded_sites[i];
  }
  out << '\n';
}

}  // namespace bob
