/*
 * Copyright 2026 The SWAM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "swam/metrics.hpp"
#include "test_util.hpp"

using namespace swam;

namespace {

struct Case {
  LabelMatrix y;
  ScoreMatrix s;
  std::vector<std::vector<int>> yn;
  std::vector<std::vector<double>> sn;
};

// Scores are quantized to a coarse grid so ties occur often.
Case random_case(std::mt19937_64& rng) {
  const int docs = 1 + static_cast<int>(rng() % 30), labels = 1 + static_cast<int>(rng() % 12);
  Case c{LabelMatrix(docs, labels), ScoreMatrix(docs, labels), {}, {}};
  const double prior = 0.05 + 0.9 * std::uniform_real_distribution<double>()(rng);
  const int levels = 2 + static_cast<int>(rng() % 20);
  for (int d = 0; d < docs; ++d) {
    c.yn.emplace_back(labels);
    c.sn.emplace_back(labels);
    for (int l = 0; l < labels; ++l) {
      const int y = std::bernoulli_distribution(prior)(rng) ? 1 : 0;
      const double s = static_cast<double>(rng() % static_cast<unsigned>(levels) + 1) / (levels + 2.0);
      c.y(d, l) = y;
      c.s(d, l) = s;
      c.yn[static_cast<std::size_t>(d)][static_cast<std::size_t>(l)] = y;
      c.sn[static_cast<std::size_t>(d)][static_cast<std::size_t>(l)] = s;
    }
  }
  return c;
}

std::vector<double> column(const std::vector<std::vector<double>>& m, std::size_t l) {
  std::vector<double> c;
  for (auto& r : m) c.push_back(r[l]);
  return c;
}
std::vector<int> column(const std::vector<std::vector<int>>& m, std::size_t l) {
  std::vector<int> c;
  for (auto& r : m) c.push_back(r[l]);
  return c;
}

std::vector<std::string> codes(std::size_t n) {
  std::vector<std::string> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(synthetic_label_code(i));
  return c;
}

}  // namespace

TEST(MetricsOracle, F1AucAndPrecisionAgreeOnRandomCases) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 150; ++trial) {
    auto c = random_case(rng);
    const double thr = std::vector<double>{0.3, 0.5, 0.7}[trial % 3];
    auto mine = f1_scores(c.y, c.s, thr);
    auto ref = oracle::f1(c.yn, c.sn, thr);
    ASSERT_NEAR(mine.macro_f1, ref.macro, 1e-12) << trial;
    ASSERT_NEAR(mine.micro_f1, ref.micro, 1e-12) << trial;
    for (std::size_t l = 0; l < ref.per_label.size(); ++l) ASSERT_NEAR(mine.per_label[l].f1, ref.per_label[l], 1e-12);

    auto auc = auc_scores(c.y, c.s);
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t l = 0; l < ref.per_label.size(); ++l) {
      auto a = oracle::auc(column(c.sn, l), column(c.yn, l));
      ASSERT_EQ(a.has_value(), auc.per_label[l].has_value());
      if (a) {
        ASSERT_NEAR(*a, *auc.per_label[l], 1e-12);
        sum += *a;
        ++n;
      }
    }
    ASSERT_EQ(auc.macro_auc.has_value(), n > 0);
    if (n) {
      ASSERT_NEAR(*auc.macro_auc, sum / static_cast<double>(n), 1e-12);
    }
    std::vector<double> all_s;
    std::vector<int> all_y;
    for (std::size_t l = 0; l < ref.per_label.size(); ++l) {
      auto s = column(c.sn, l);
      auto y = column(c.yn, l);
      all_s.insert(all_s.end(), s.begin(), s.end());
      all_y.insert(all_y.end(), y.begin(), y.end());
    }
    auto micro = oracle::auc(all_s, all_y);
    ASSERT_EQ(micro.has_value(), auc.micro_auc.has_value());
    if (micro) {
      ASSERT_NEAR(*micro, *auc.micro_auc, 1e-12);
    }

    for (std::size_t k = 1; k <= static_cast<std::size_t>(c.y.cols()); ++k)
      ASSERT_NEAR(precision_at_n(c.y, c.s, k), oracle::p_at_n(c.yn, c.sn, k), 1e-12);
  }
}

TEST(Metrics, F1HandExample) {
  LabelMatrix y(4, 2);
  y << 1, 0, 1, 0, 0, 1, 0, 0;
  ScoreMatrix s(4, 2);
  s << 0.9, 0.1, 0.2, 0.6, 0.7, 0.8, 0.1, 0.2;
  auto r = f1_scores(y, s);
  // label 0: tp 1 fp 1 fn 1 -> 0.5. label 1: tp 1 fp 1 fn 0 -> 2/3.
  EXPECT_NEAR(r.per_label[0].f1, 0.5, 1e-15);
  EXPECT_NEAR(r.per_label[1].f1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.macro_f1, (0.5 + 2.0 / 3.0) / 2, 1e-15);
  EXPECT_NEAR(r.micro_f1, 4.0 / 7.0, 1e-15);  // tp 2 fp 2 fn 1
}

TEST(Metrics, ThresholdIsStrict) {
  LabelMatrix y(1, 1);
  y << 1;
  ScoreMatrix s(1, 1);
  s << 0.5;
  EXPECT_EQ(f1_scores(y, s).per_label[0].counts.tp, 0u);
  s << std::nextafter(0.5, 1.0);
  EXPECT_EQ(f1_scores(y, s).per_label[0].counts.tp, 1u);
  EXPECT_THROW(f1_scores(y, s, 0.0), std::invalid_argument);
  EXPECT_THROW(f1_scores(y, s, 1.0), std::invalid_argument);
}

TEST(Metrics, LabelWithoutPositivesOrPredictionsCountsZeroInMacro) {
  LabelMatrix y(3, 2);
  y << 1, 0, 1, 0, 0, 0;
  ScoreMatrix s(3, 2);
  s << 0.9, 0.1, 0.8, 0.2, 0.1, 0.3;
  auto r = f1_scores(y, s);
  EXPECT_EQ(r.per_label[1].f1, 0.0);
  EXPECT_EQ(r.per_label[1].precision, 0.0);
  EXPECT_EQ(r.per_label[1].recall, 0.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, 0.5);
  EXPECT_DOUBLE_EQ(r.micro_f1, 1.0);
}

TEST(Metrics, AucTiesAndPerfectSeparation) {
  EXPECT_DOUBLE_EQ(*binary_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(*binary_auc({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*binary_auc({0.5, 0.5, 0.5}, {1, 0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(*binary_auc({0.3, 0.5, 0.5, 0.7}, {0, 1, 0, 1}), 0.875);
  EXPECT_FALSE(binary_auc({0.1, 0.2}, {1, 1}).has_value());
  EXPECT_FALSE(binary_auc({0.1, 0.2}, {0, 0}).has_value());
  EXPECT_FALSE(binary_auc({}, {}).has_value());
}

TEST(Metrics, AucExcludesDegenerateLabelsFromMacro) {
  LabelMatrix y(3, 3);
  y << 1, 1, 0, 0, 1, 0, 1, 1, 0;
  ScoreMatrix s(3, 3);
  s << 0.9, 0.5, 0.2, 0.1, 0.5, 0.3, 0.8, 0.5, 0.4;
  auto r = auc_scores(y, s);
  EXPECT_EQ(r.excluded, (std::vector<std::size_t>{1, 2}));
  EXPECT_DOUBLE_EQ(*r.macro_auc, 1.0);
  EXPECT_TRUE(r.micro_auc.has_value());

  LabelMatrix all_pos = LabelMatrix::Ones(3, 3);
  auto none = auc_scores(all_pos, s);
  EXPECT_FALSE(none.macro_auc.has_value());
  EXPECT_FALSE(none.micro_auc.has_value());
  EXPECT_EQ(none.excluded.size(), 3u);
}

TEST(Metrics, AucInvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto c = random_case(rng);
    ScoreMatrix g = c.s.unaryExpr([](double v) { return std::log(v) * 3.0 + 7.0; });
    auto a = auc_scores(c.y, c.s), b = auc_scores(c.y, g);
    ASSERT_EQ(a.per_label, b.per_label);
    ASSERT_EQ(a.macro_auc, b.macro_auc);
  }
}

TEST(Metrics, MacroInvariantUnderLabelPermutation) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    auto c = random_case(rng);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(c.y.cols()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LabelMatrix yp(c.y.rows(), c.y.cols());
    ScoreMatrix sp(c.s.rows(), c.s.cols());
    for (std::size_t j = 0; j < perm.size(); ++j) {
      yp.col(static_cast<Eigen::Index>(j)) = c.y.col(perm[j]);
      sp.col(static_cast<Eigen::Index>(j)) = c.s.col(perm[j]);
    }
    ASSERT_NEAR(f1_scores(c.y, c.s).macro_f1, f1_scores(yp, sp).macro_f1, 1e-12);
    ASSERT_NEAR(f1_scores(c.y, c.s).micro_f1, f1_scores(yp, sp).micro_f1, 1e-12);
    auto a = auc_scores(c.y, c.s).macro_auc, b = auc_scores(yp, sp).macro_auc;
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      ASSERT_NEAR(*a, *b, 1e-12);
    }
  }
}

TEST(Metrics, DuplicatingEveryDocumentChangesNothing) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto c = random_case(rng);
    LabelMatrix y2(2 * c.y.rows(), c.y.cols());
    ScoreMatrix s2(2 * c.s.rows(), c.s.cols());
    y2 << c.y, c.y;
    s2 << c.s, c.s;
    ASSERT_NEAR(f1_scores(c.y, c.s).macro_f1, f1_scores(y2, s2).macro_f1, 1e-12);
    ASSERT_NEAR(precision_at_n(c.y, c.s, 1), precision_at_n(y2, s2, 1), 1e-12);
    auto a = auc_scores(c.y, c.s).micro_auc, b = auc_scores(y2, s2).micro_auc;
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      ASSERT_NEAR(*a, *b, 1e-12);
    }
  }
}

TEST(Metrics, PrecisionAtNTieBreakAndRange) {
  LabelMatrix y(1, 4);
  y << 0, 1, 1, 0;
  ScoreMatrix s = ScoreMatrix::Constant(1, 4, 0.5);
  EXPECT_DOUBLE_EQ(precision_at_n(y, s, 1), 0.0);  // label 0 wins the tie
  EXPECT_DOUBLE_EQ(precision_at_n(y, s, 2), 0.5);
  EXPECT_DOUBLE_EQ(precision_at_n(y, s, 3), 2.0 / 3.0);
  EXPECT_THROW(precision_at_n(y, s, 0), std::invalid_argument);
  EXPECT_THROW(precision_at_n(y, s, 5), std::invalid_argument);
  EXPECT_DOUBLE_EQ(precision_at_n(LabelMatrix(0, 4), ScoreMatrix(0, 4), 2), 0.0);
}

TEST(Metrics, ShapeMismatchRejected) {
  EXPECT_THROW(f1_scores(LabelMatrix::Zero(2, 3), ScoreMatrix::Zero(3, 2)), std::invalid_argument);
  EXPECT_THROW(auc_scores(LabelMatrix::Zero(2, 3), ScoreMatrix::Zero(2, 2)), std::invalid_argument);
}

TEST(Evaluate, ZeroPrecisionListNeedsSupport) {
  LabelMatrix y(3, 3);
  y << 1, 0, 0, 1, 1, 0, 0, 1, 0;
  ScoreMatrix s(3, 3);
  s << 0.9, 0.1, 0.9, 0.8, 0.2, 0.1, 0.1, 0.3, 0.2;
  auto e = evaluate_scores(y, s, codes(3), {1, 2, 5});
  // L001 has support 2 and no true positive; L002 has support 0.
  EXPECT_EQ(e.zero_precision_labels, (std::vector<std::string>{"L001"}));
  EXPECT_EQ(e.auc_excluded_labels, (std::vector<std::string>{"L002"}));
  ASSERT_EQ(e.precision_at.size(), 2u);  // n = 5 exceeds the label count
  EXPECT_TRUE(e.p_at(2).has_value());
  EXPECT_FALSE(e.p_at(5).has_value());
  EXPECT_THROW(evaluate_scores(y, s, codes(2), {1}), std::invalid_argument);
}

TEST(Evaluate, ZeroOutputLayerPredictsHalfEverywhere) {
  ModelConfig c;
  c.embed_dim = 4;
  c.num_filters = 5;
  c.filter_width = 2;
  c.num_labels = 3;
  c.max_len = 100;
  auto m = test_util::random_model(c, 20, 3);
  m.params.output_w.setZero();
  m.params.output_b.setZero();
  std::mt19937_64 rng(4);
  std::vector<Document> docs;
  for (int i = 0; i < 6; ++i) docs.push_back(test_util::random_doc(9, 20, 3, rng));
  auto s = predict_scores(m, docs);
  EXPECT_TRUE((s.array() == 0.5).all());
  auto e = evaluate(m, docs, codes(3), {1});
  EXPECT_EQ(e.macro_f1, 0.0);  // 0.5 is not above the threshold
  for (auto& l : e.per_label) {
    if (l.auc) {
      EXPECT_DOUBLE_EQ(*l.auc, 0.5);
    }
  }
}

TEST(Evaluate, ReportListsRulesAndEveryLabel) {
  LabelMatrix y(2, 2);
  y << 1, 0, 0, 1;
  ScoreMatrix s(2, 2);
  s << 0.9, 0.2, 0.4, 0.3;
  auto e = evaluate_scores(y, s, codes(2), {1, 2});
  std::ostringstream os;
  write_eval_report(e, os);
  const auto text = os.str();
  for (const char* needle : {"decision_rule\tpositive iff y_hat > 0.500000", "macro_f1_rule", "macro_auc_rule",
                             "p@1", "p@2", "L000", "L001", "zero_precision"})
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
}
