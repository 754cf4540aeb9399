#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "promptsent/metrics.hpp"

using namespace promptsent;

namespace {
using Pairs = std::vector<std::pair<int, int>>;

// Mean of per-class F1 recomputed from raw counts.
double macro_f1_from_counts(const std::vector<ClassCounts>& counts) {
  double sum = 0.0;
  for (const auto& c : counts) {
    double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
    double r = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
    sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return sum / double(counts.size());
}
}  // namespace

TEST(Metrics, HandComputedTwoClassExample) {
  // gold (A, A, B), pred (A, B, B) with A = 0, B = 1
  Pairs pairs{{0, 0}, {0, 1}, {1, 1}};
  auto m = compute_metrics(pairs, 2);
  EXPECT_NEAR(m.accuracy, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(m.per_class[0].precision, 1.0, 1e-9);
  EXPECT_NEAR(m.per_class[0].recall, 0.5, 1e-9);
  EXPECT_NEAR(m.per_class[0].f1, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(m.per_class[1].precision, 0.5, 1e-9);
  EXPECT_NEAR(m.per_class[1].recall, 1.0, 1e-9);
  EXPECT_NEAR(m.per_class[1].f1, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(m.macro_f1, 2.0 / 3.0, 1e-9);
  EXPECT_EQ(m.counts[0].tp, 1u);
  EXPECT_EQ(m.counts[0].fn, 1u);
  EXPECT_EQ(m.counts[0].fp, 0u);
  EXPECT_EQ(m.counts[0].tn, 1u);
}

TEST(Metrics, PerfectPredictions) {
  Pairs pairs{{0, 0}, {1, 1}, {2, 2}, {1, 1}};
  auto m = compute_metrics(pairs, 3);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_precision, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_recall, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, ZeroDivisionCountsAsZero) {
  Pairs pairs{{0, 0}, {0, 0}};
  auto m = compute_metrics(pairs, 2);
  EXPECT_DOUBLE_EQ(m.per_class[1].precision, 0.0);
  EXPECT_DOUBLE_EQ(m.per_class[1].recall, 0.0);
  EXPECT_DOUBLE_EQ(m.per_class[1].f1, 0.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 0.5);
}

TEST(Metrics, RejectsEmptyAndOutOfRange) {
  EXPECT_THROW(compute_metrics(Pairs{}, 2), std::invalid_argument);
  EXPECT_THROW(compute_metrics(Pairs{{0, 2}}, 2), std::invalid_argument);
  EXPECT_THROW(compute_metrics(Pairs{{-1, 0}}, 2), std::invalid_argument);
}

TEST(Metrics, RandomInvariants) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + int(rng() % 4);
    const std::size_t n = 1 + rng() % 40;
    Pairs pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({int(rng() % k), int(rng() % k)});
    auto m = compute_metrics(pairs, k);

    for (const auto& c : m.counts) EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, n);
    EXPECT_NEAR(m.macro_f1, macro_f1_from_counts(m.counts), 1e-9);
    double p = 0, r = 0;
    for (const auto& pc : m.per_class) {
      p += pc.precision;
      r += pc.recall;
      for (double v : {pc.precision, pc.recall, pc.f1}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
    EXPECT_NEAR(m.macro_precision, p / k, 1e-12);
    EXPECT_NEAR(m.macro_recall, r / k, 1e-12);

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Pairs relabeled;
    for (auto [g, q] : pairs) relabeled.push_back({perm[g], perm[q]});
    auto m2 = compute_metrics(relabeled, k);
    EXPECT_NEAR(m2.accuracy, m.accuracy, 1e-12);
    EXPECT_NEAR(m2.macro_precision, m.macro_precision, 1e-12);
    EXPECT_NEAR(m2.macro_recall, m.macro_recall, 1e-12);
    EXPECT_NEAR(m2.macro_f1, m.macro_f1, 1e-12);
  }
}

TEST(EvalReport, TableColumnOrderAndJson) {
  EvalReport report;
  report.asc = compute_metrics(Pairs{{0, 0}, {0, 1}, {1, 1}}, 2);
  report.asc->class_names = {"negative", "positive"};
  report.notices.push_back("ATE skipped: no aspect labels");
  auto table = report.table();
  auto header = table.substr(0, table.find('\n'));
  auto pos = [&](const char* s) { return header.find(s); };
  EXPECT_LT(pos("Accuracy"), pos("Precision"));
  EXPECT_LT(pos("Precision"), pos("Recall"));
  EXPECT_LT(pos("Recall"), pos("F1"));
  EXPECT_NE(table.find("ASC"), std::string::npos);
  EXPECT_NE(table.find("0.6667"), std::string::npos);

  auto j = report.to_json();
  EXPECT_NEAR(j["asc"]["macro_f1"].get<double>(), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(j["asc"]["classes"][1]["class"], "positive");
  EXPECT_FALSE(j.contains("ate"));
  EXPECT_EQ(j["notices"].size(), 1u);
}
