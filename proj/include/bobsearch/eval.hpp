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

/// @file eval.hpp
/// @brief Leave-one-patient-out retrieval evaluation.
///
/// Every slide passing the section filter is used once as a query. Top-n
/// counts a query as correct when any of its first n hits carries the true
/// label; majority-n only when the plurality label of the first n hits does.
/// Accuracies are percentages per label.

#ifndef BOBSEARCH_EVAL_HPP_
#define BOBSEARCH_EVAL_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bobsearch/index.hpp"

namespace bob {

struct QueryResult {
  std::string query_slide_id;
  std::string query_patient_id;
  std::string true_label;
  /// Ranked hits. Inside an evaluation, subtype_code holds the hit's
  /// evaluation label (the tumour-type group when a grouping is in use).
  std::vector<SearchHit> hits;
};

bool top_n_success(const QueryResult& result, std::size_t n);

/// Plurality label over the first min(n, hits) hits. Ties go to the smallest
/// summed distance, then to the earliest first occurrence. nullopt (abstain)
/// when there are no hits.
std::optional<std::string> majority_vote(const QueryResult& result,
                                         std::size_t n);

bool majority_success(const QueryResult& result, std::size_t n);

enum class SectionFilter { kAll, kFrozen, kPermanent };

std::string_view to_string(SectionFilter filter) noexcept;
std::string_view to_string(Scope scope) noexcept;

struct EvalConfig {
  Scope scope = Scope::kHorizontal;
  SectionFilter section = SectionFilter::kAll;
  /// n values for both top-n and majority-n.
  std::vector<std::size_t> ns = {3, 5, 7, 10, 15, 20};
  /// subtype_code -> evaluation label for horizontal runs (e.g. GBM and LGG
  /// -> Brain). Subtypes without an entry keep their own code.
  std::map<std::string, std::string> grouping;
  /// Per-query scoring threads.
  unsigned threads = 1;
};

struct LabelRow {
  std::string label;
  std::size_t wsi_count = 0;
  std::size_t patient_count = 0;
  std::map<std::size_t, double> top_accuracy;       // n -> percent
  std::map<std::size_t, double> majority_accuracy;  // n -> percent

  double best_majority() const;
};

struct EvalReport {
  Scope scope = Scope::kHorizontal;
  SectionFilter section = SectionFilter::kAll;
  std::vector<std::size_t> ns;
  std::vector<LabelRow> rows;  // sorted by label
  std::size_t query_count = 0;
  std::vector<std::string> excluded_sites;  // vertical: sites with < 2 subtypes
  /// pearson(patient_count, best majority accuracy) over labels; NaN when
  /// undefined.
  double correlation = 0.0;
  /// Cox-Stuart p-values of the majority-10 accuracies (largest n when 10 is
  /// not evaluated) ordered by ascending patient count; NaN when degenerate.
  double trend_p_increasing = 0.0;
  double trend_p_decreasing = 0.0;
};

struct Evaluation {
  EvalReport report;
  std::vector<QueryResult> results;
  /// Slides per evaluation label in the candidate pool; heatmap divisor.
  std::map<std::string, std::size_t> slide_counts;
};

/// Throws kEmptyCatalog when the index (or the filtered query set) is empty.
Evaluation evaluate(const Index& index, const EvalConfig& config);

struct LabeledMatrix {
  std::vector<std::string> labels;  // rows and columns
  std::vector<std::vector<double>> values;

  bool operator==(const LabeledMatrix&) const = default;
};

/// M[i][j] = occurrences of label j among the first n hits of queries whose
/// true label is i. Labels are the sorted union of true and hit labels.
/// Throws kEmptyInput on no results.
LabeledMatrix confusion_frequency(std::span<const QueryResult> results,
                                  std::size_t n = 10);

/// M'[i][j] = M[i][j] / slide_count(label j). Throws kDivision when a column
/// label has no positive count.
LabeledMatrix rescale_heatmap(const LabeledMatrix& m,
                              const std::map<std::string, std::size_t>& counts);

/// Confusion frequencies with the diagonal zeroed; never thresholded.
LabeledMatrix chord_matrix(std::span<const QueryResult> results,
                           std::size_t n = 10);

/// Label header row and column, values in %.9g.
void write_matrix_csv(std::ostream& out, const LabeledMatrix& m);

/// Summary table: horizontal runs list Top-10, Top-5, Top-3, Majority-5,
/// Majority-10; vertical runs Majority-3 to Majority-20. `full` writes every
/// evaluated n for both metrics instead.
void write_report_csv(std::ostream& out, const EvalReport& report,
                      bool full = false);

/// key,value lines: scope, section, queries, correlation, trend p-values,
/// excluded sites.
void write_summary_csv(std::ostream& out, const EvalReport& report);

}  // namespace bob

#endif  // BOBSEARCH_EVAL_HPP_
