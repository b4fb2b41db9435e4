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

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bobsearch/error.hpp"
#include "bobsearch/eval.hpp"
#include "test_support.hpp"

namespace bob {
namespace {

SearchHit hit(const std::string& label, double distance,
              const std::string& patient = "x") {
  return {"s", label, patient, distance};
}

QueryResult result_of(const std::string& truth, std::vector<SearchHit> hits) {
  QueryResult r;
  r.query_slide_id = "q";
  r.query_patient_id = "qp";
  r.true_label = truth;
  r.hits = std::move(hits);
  return r;
}

TEST(Metrics, TopN) {
  const auto r = result_of("A", {hit("B", 1), hit("B", 2), hit("A", 3)});
  EXPECT_FALSE(top_n_success(r, 2));
  EXPECT_TRUE(top_n_success(r, 3));
  EXPECT_TRUE(top_n_success(r, 10));  // fewer hits than n
}

TEST(Metrics, MajorityPlurality) {
  const auto r = result_of(
      "A", {hit("A", 1), hit("B", 2), hit("B", 3), hit("A", 4), hit("A", 5)});
  EXPECT_EQ(majority_vote(r, 5), "A");
  EXPECT_EQ(majority_vote(r, 3), "B");
  EXPECT_FALSE(majority_success(r, 3));
}

TEST(Metrics, MajorityTieBreaks) {
  // 2-2 tie: B has the smaller summed distance.
  auto r = result_of("A", {hit("A", 1), hit("B", 2), hit("B", 2), hit("A", 4)});
  EXPECT_EQ(majority_vote(r, 4), "B");
  // 1-1 tie with equal sums: earliest first occurrence wins.
  r = result_of("A", {hit("C", 3), hit("A", 3)});
  EXPECT_EQ(majority_vote(r, 2), "C");
  r = result_of("A", {});
  EXPECT_EQ(majority_vote(r, 5), std::nullopt);
  EXPECT_FALSE(majority_success(r, 5));
}

TEST(Matrices, ConfusionCountsFirstNHits) {
  const std::vector<QueryResult> results = {
      result_of("A", {hit("A", 0), hit("B", 1), hit("B", 2)}),
      result_of("B", {hit("C", 0), hit("B", 1)}),
  };
  const auto m = confusion_frequency(results, 2);
  EXPECT_EQ(m.labels, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(m.values, (std::vector<std::vector<double>>{
                          {1, 1, 0}, {0, 1, 1}, {0, 0, 0}}));
  const auto chord = chord_matrix(results, 2);
  EXPECT_EQ(chord.values, (std::vector<std::vector<double>>{
                              {0, 1, 0}, {0, 0, 1}, {0, 0, 0}}));
}

TEST(Matrices, HeatmapDividesColumns) {
  LabeledMatrix m{{"A", "B"}, {{4, 6}, {2, 9}}};
  const auto h = rescale_heatmap(m, {{"A", 2}, {"B", 3}});
  EXPECT_EQ(h.values, (std::vector<std::vector<double>>{{2, 2}, {1, 3}}));
  try {
    rescale_heatmap(m, {{"A", 2}, {"B", 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivision);
  }
  EXPECT_THROW(rescale_heatmap(m, {{"A", 2}}), Error);
  EXPECT_THROW(confusion_frequency({}, 10), Error);
}

TEST(Matrices, CsvLayout) {
  std::ostringstream out;
  write_matrix_csv(out, {{"A", "B"}, {{1, 0.5}, {0, 2}}});
  EXPECT_EQ(out.str(), "label,A,B\nA,1,0.5\nB,0,2\n");
}

// Reference accuracy table built from the exhaustive scorer and a separately
// written vote.
struct OracleRow {
  std::size_t queries = 0;
  std::set<std::string> patients;
  std::map<std::size_t, std::size_t> top, majority;
};

std::string oracle_vote(const std::vector<std::pair<std::string, double>>& h) {
  std::map<std::string, std::tuple<long, double, std::size_t>> score;
  for (std::size_t i = 0; i < h.size(); ++i) {
    auto& [votes, sum, first] = score[h[i].first];
    if (votes == 0) first = i;
    --votes;  // negated so that the lexicographic minimum wins
    sum += h[i].second;
  }
  auto best = score.begin();
  for (auto it = score.begin(); it != score.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

TEST(Evaluate, MatchesOracleOnRandomCorpus) {
  const auto corpus = testing::random_corpus(31, 120, 60, 6, 1023);
  const Index index = testing::to_index(corpus);
  for (bool vertical : {false, true}) {
    EvalConfig config;
    config.scope = vertical ? Scope::kVertical : Scope::kHorizontal;
    config.threads = 4;
    const Evaluation ev = evaluate(index, config);

    // Sites SITE0 {T0,T1}, SITE1 {T2,T3}, SITE2 {T4}: SITE2 is dropped for
    // vertical runs.
    std::map<std::string, OracleRow> rows;
    for (std::size_t q = 0; q < corpus.size(); ++q) {
      const SlideRecord& rec = corpus[q].record;
      if (vertical && rec.anatomic_site == "SITE2") continue;
      const auto hits = testing::oracle_search<1023>(corpus, q, 20, vertical);
      std::vector<std::pair<std::string, double>> labelled;
      for (const auto& h : hits) {
        for (const auto& s : corpus) {
          if (s.record.slide_id == h.slide_id) {
            labelled.emplace_back(s.record.subtype_code, h.distance);
          }
        }
      }
      OracleRow& row = rows[rec.subtype_code];
      ++row.queries;
      row.patients.insert(rec.patient_id);
      for (std::size_t n : config.ns) {
        const std::vector<std::pair<std::string, double>> first(
            labelled.begin(),
            labelled.begin() + static_cast<long>(std::min(n, labelled.size())));
        bool any = false;
        for (const auto& [label, d] : first) any |= label == rec.subtype_code;
        row.top[n] += any;
        row.majority[n] += !first.empty() && oracle_vote(first) == rec.subtype_code;
      }
    }

    ASSERT_EQ(ev.report.rows.size(), rows.size());
    EXPECT_EQ(ev.report.excluded_sites,
              vertical ? std::vector<std::string>{"SITE2"}
                       : std::vector<std::string>{});
    for (const LabelRow& row : ev.report.rows) {
      const OracleRow& want = rows.at(row.label);
      EXPECT_EQ(row.wsi_count, want.queries);
      EXPECT_EQ(row.patient_count, want.patients.size());
      for (std::size_t n : config.ns) {
        const double q = static_cast<double>(want.queries);
        EXPECT_DOUBLE_EQ(row.top_accuracy.at(n), 100.0 * static_cast<double>(want.top.at(n)) / q);
        EXPECT_DOUBLE_EQ(row.majority_accuracy.at(n),
                         100.0 * static_cast<double>(want.majority.at(n)) / q);
        EXPECT_LE(row.majority_accuracy.at(n), row.top_accuracy.at(n));
      }
    }
    for (const QueryResult& r : ev.results) {
      for (const SearchHit& h : r.hits) EXPECT_NE(h.patient_id, r.query_patient_id);
    }
  }
}

TEST(Evaluate, ThreadCountDoesNotChangeResults) {
  const Index index =
      testing::to_index(testing::random_corpus(32, 80, 40, 4, 255));
  EvalConfig one;
  EvalConfig many;
  many.threads = 7;
  const auto a = evaluate(index, one);
  const auto b = evaluate(index, many);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].hits, b.results[i].hits);
  }
  std::ostringstream ra, rb;
  write_report_csv(ra, a.report, true);
  write_report_csv(rb, b.report, true);
  EXPECT_EQ(ra.str(), rb.str());
}

TEST(Evaluate, GroupingMergesLabelsForHorizontalOnly) {
  const Index index =
      testing::to_index(testing::random_corpus(33, 60, 30, 3, 127));
  EvalConfig config;
  config.grouping = {{"T0", "G"}, {"T1", "G"}};
  const auto h = evaluate(index, config);
  std::vector<std::string> labels;
  for (const auto& row : h.report.rows) labels.push_back(row.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"G", "T2", "T3", "T4"}));
  for (const QueryResult& r : h.results) {
    for (const SearchHit& hit : r.hits) {
      EXPECT_NE(hit.subtype_code, "T0");
      EXPECT_NE(hit.subtype_code, "T1");
    }
  }
  config.scope = Scope::kVertical;
  const auto v = evaluate(index, config);
  EXPECT_EQ(v.report.rows.front().label, "T0");
}

TEST(Evaluate, SectionFilterRestrictsQueriesAndCandidates) {
  const auto corpus = testing::random_corpus(34, 80, 40, 3, 64);
  const Index index = testing::to_index(corpus);
  EvalConfig config;
  config.section = SectionFilter::kFrozen;
  const auto ev = evaluate(index, config);
  std::size_t frozen = 0;
  for (const auto& s : corpus) frozen += s.record.section_type == SectionType::kFrozen;
  EXPECT_EQ(ev.report.query_count, frozen);
  for (const QueryResult& r : ev.results) {
    EXPECT_EQ(index.find(r.query_slide_id)->section_type, SectionType::kFrozen);
    for (const SearchHit& h : r.hits) {
      EXPECT_EQ(index.find(h.slide_id)->section_type, SectionType::kFrozen);
    }
  }
}

TEST(Evaluate, SummaryStatistics) {
  const Index index =
      testing::to_index(testing::random_corpus(35, 100, 50, 3, 64));
  const auto ev = evaluate(index, {});
  std::vector<double> patients, best;
  for (const LabelRow& row : ev.report.rows) {
    patients.push_back(static_cast<double>(row.patient_count));
    best.push_back(row.best_majority());
  }
  // Independent two-pass correlation.
  const double n = static_cast<double>(patients.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < patients.size(); ++i) {
    mx += patients[i] / n;
    my += best[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < patients.size(); ++i) {
    sxy += (patients[i] - mx) * (best[i] - my);
    sxx += (patients[i] - mx) * (patients[i] - mx);
    syy += (best[i] - my) * (best[i] - my);
  }
  if (sxx > 0 && syy > 0) {
    EXPECT_NEAR(ev.report.correlation, sxy / std::sqrt(sxx * syy), 1e-12);
  } else {
    EXPECT_TRUE(std::isnan(ev.report.correlation));
  }
  std::ostringstream summary;
  write_summary_csv(summary, ev.report);
  EXPECT_EQ(summary.str().rfind("key,value\nscope,horizontal\nsection,all\n", 0),
            0U);
}

TEST(Evaluate, ReportLayouts) {
  const Index index =
      testing::to_index(testing::random_corpus(36, 40, 20, 2, 32));
  EvalConfig config;
  std::ostringstream h;
  write_report_csv(h, evaluate(index, config).report);
  EXPECT_EQ(h.str().substr(0, h.str().find('\n')),
            "Tumor Type,WSI Count,Patient Count,Top-10,Top-5,Top-3,"
            "Majority-5,Majority-10");
  config.scope = Scope::kVertical;
  std::ostringstream v;
  write_report_csv(v, evaluate(index, config).report);
  EXPECT_EQ(v.str().substr(0, v.str().find('\n')),
            "Tumor Type,WSI Count,Patient Count,Majority-3,Majority-5,"
            "Majority-7,Majority-10,Majority-15,Majority-20");
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(evaluate(Index{}, {}), Error);
  const Index index = testing::to_index(testing::random_corpus(37, 5, 5, 1, 8));
  EvalConfig bad;
  bad.ns = {0, 3};
  try {
    evaluate(index, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

}  // namespace
}  // namespace bob
