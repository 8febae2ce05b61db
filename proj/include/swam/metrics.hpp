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

// Multi-label evaluation: macro/micro F1, macro/micro ROC AUC, precision@n.
//
// Inputs are docs x labels matrices. Conventions:
//   - a label is predicted positive iff y_hat > threshold (strict);
//   - P, R and F1 use 0/0 -> 0; macro-F1 averages every label;
//   - AUC ties count 1/2; labels lacking positives or negatives are excluded
//     from macro-AUC and listed;
//   - ranking ties in P@n go to the lower label index.

#ifndef SWAM_METRICS_HPP
#define SWAM_METRICS_HPP

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swam/corpus.hpp"
#include "swam/model.hpp"

namespace swam {

using LabelMatrix = Eigen::MatrixXi;  // docs x labels, entries 0/1
using ScoreMatrix = Eigen::MatrixXd;  // docs x labels

inline constexpr double kDefaultThreshold = 0.5;

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_from_counts(const ConfusionCounts& c) {
  const double p = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  const double r = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  return safe_ratio(2.0 * p * r, p + r);
}

struct LabelF1 {
  ConfusionCounts counts;
  double precision = 0, recall = 0, f1 = 0;
  std::size_t support() const { return counts.tp + counts.fn; }
};

struct F1Result {
  std::vector<LabelF1> per_label;
  double macro_f1 = 0;
  double micro_f1 = 0;
};

inline void check_same_shape(const LabelMatrix& y, const ScoreMatrix& s) {
  if (y.rows() != s.rows() || y.cols() != s.cols()) throw std::invalid_argument("metrics: shape mismatch");
}

inline F1Result f1_scores(const LabelMatrix& y_true, const ScoreMatrix& y_prob, double threshold = kDefaultThreshold) {
  check_same_shape(y_true, y_prob);
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("f1_scores: threshold must be in (0,1)");
  F1Result r;
  r.per_label.resize(static_cast<std::size_t>(y_true.cols()));
  ConfusionCounts pooled;
  for (Eigen::Index l = 0; l < y_true.cols(); ++l) {
    auto& c = r.per_label[static_cast<std::size_t>(l)].counts;
    for (Eigen::Index d = 0; d < y_true.rows(); ++d) {
      const bool truth = y_true(d, l) != 0, pred = y_prob(d, l) > threshold;
      (truth ? (pred ? c.tp : c.fn) : (pred ? c.fp : c.tn))++;
    }
    auto& m = r.per_label[static_cast<std::size_t>(l)];
    m.precision = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    m.recall = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    m.f1 = f1_from_counts(c);
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
    pooled.tn += c.tn;
  }
  double sum = 0.0;
  for (const auto& m : r.per_label) sum += m.f1;
  r.macro_f1 = r.per_label.empty() ? 0.0 : sum / static_cast<double>(r.per_label.size());
  r.micro_f1 = f1_from_counts(pooled);
  return r;
}

// Mann-Whitney estimate of P(score_pos > score_neg), ties counting 1/2.
// Empty when either class is missing.
inline std::optional<double> binary_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[idx[t]]) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

struct AucResult {
  std::vector<std::optional<double>> per_label;
  std::optional<double> macro_auc;
  std::optional<double> micro_auc;
  std::vector<std::size_t> excluded;  // labels without both classes
};

inline AucResult auc_scores(const LabelMatrix& y_true, const ScoreMatrix& y_prob) {
  check_same_shape(y_true, y_prob);
  AucResult r;
  std::vector<double> pooled_s;
  std::vector<int> pooled_y;
  double sum = 0.0;
  std::size_t included = 0;
  for (Eigen::Index l = 0; l < y_true.cols(); ++l) {
    std::vector<double> s(static_cast<std::size_t>(y_true.rows()));
    std::vector<int> y(s.size());
    for (Eigen::Index d = 0; d < y_true.rows(); ++d) {
      s[static_cast<std::size_t>(d)] = y_prob(d, l);
      y[static_cast<std::size_t>(d)] = y_true(d, l) != 0;
    }
    pooled_s.insert(pooled_s.end(), s.begin(), s.end());
    pooled_y.insert(pooled_y.end(), y.begin(), y.end());
    auto a = binary_auc(s, y);
    r.per_label.push_back(a);
    if (a) {
      sum += *a;
      ++included;
    } else {
      r.excluded.push_back(static_cast<std::size_t>(l));
    }
  }
  if (included > 0) r.macro_auc = sum / static_cast<double>(included);
  r.micro_auc = binary_auc(pooled_s, pooled_y);
  return r;
}

inline double precision_at_n(const LabelMatrix& y_true, const ScoreMatrix& y_prob, std::size_t n) {
  check_same_shape(y_true, y_prob);
  if (n < 1 || n > static_cast<std::size_t>(y_true.cols())) {
    throw std::invalid_argument("precision_at_n: need 1 <= n <= number of labels");
  }
  if (y_true.rows() == 0) return 0.0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(y_true.cols()));
  double total = 0.0;
  for (Eigen::Index d = 0; d < y_true.rows(); ++d) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return y_prob(d, a) > y_prob(d, b) || (y_prob(d, a) == y_prob(d, b) && a < b);
                      });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += y_true(d, order[i]) != 0;
    total += static_cast<double>(hits) / static_cast<double>(n);
  }
  return total / static_cast<double>(y_true.rows());
}

// ---------------------------------------------------------------------------

struct LabelReport {
  std::string code;
  std::size_t support = 0;
  ConfusionCounts counts;
  double precision = 0, recall = 0, f1 = 0;
  std::optional<double> auc;
};

struct EvalResult {
  std::size_t num_docs = 0;
  double threshold = kDefaultThreshold;
  std::vector<LabelReport> per_label;
  double macro_f1 = 0, micro_f1 = 0;
  std::optional<double> macro_auc, micro_auc;
  std::vector<std::pair<std::size_t, double>> precision_at;  // (n, P@n)
  std::vector<std::string> zero_precision_labels;  // support > 0 and no true positive
  std::vector<std::string> auc_excluded_labels;

  std::optional<double> p_at(std::size_t n) const {
    for (auto& [k, v] : precision_at)
      if (k == n) return v;
    return std::nullopt;
  }
  std::vector<std::string> label_codes() const {
    std::vector<std::string> c;
    for (auto& l : per_label) c.push_back(l.code);
    return c;
  }
};

// Assembles every metric for one set of predictions. `n_list` entries larger
// than the label count are skipped.
inline EvalResult evaluate_scores(const LabelMatrix& y_true, const ScoreMatrix& y_prob,
                                  const std::vector<std::string>& codes, const std::vector<std::size_t>& n_list,
                                  double threshold = kDefaultThreshold) {
  check_same_shape(y_true, y_prob);
  if (codes.size() != static_cast<std::size_t>(y_true.cols())) throw std::invalid_argument("evaluate: label codes size");
  EvalResult e;
  e.num_docs = static_cast<std::size_t>(y_true.rows());
  e.threshold = threshold;
  auto f1 = f1_scores(y_true, y_prob, threshold);
  auto auc = auc_scores(y_true, y_prob);
  e.macro_f1 = f1.macro_f1;
  e.micro_f1 = f1.micro_f1;
  e.macro_auc = auc.macro_auc;
  e.micro_auc = auc.micro_auc;
  for (std::size_t l = 0; l < codes.size(); ++l) {
    const auto& m = f1.per_label[l];
    e.per_label.push_back({codes[l], m.support(), m.counts, m.precision, m.recall, m.f1, auc.per_label[l]});
    if (m.support() > 0 && m.counts.tp == 0) e.zero_precision_labels.push_back(codes[l]);
  }
  for (auto l : auc.excluded) e.auc_excluded_labels.push_back(codes[l]);
  for (auto n : n_list) {
    if (n >= 1 && n <= codes.size()) e.precision_at.emplace_back(n, precision_at_n(y_true, y_prob, n));
  }
  return e;
}

inline LabelMatrix label_matrix(const std::vector<Document>& docs, std::size_t num_labels) {
  LabelMatrix y(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(num_labels));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].labels.size() != num_labels) throw std::invalid_argument("document label vector has wrong size");
    for (std::size_t l = 0; l < num_labels; ++l) y(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(l)) = docs[d].labels[l];
  }
  return y;
}

inline ScoreMatrix predict_scores(const SwamModel& model, const std::vector<Document>& docs) {
  ScoreMatrix s(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(model.config.num_labels));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    s.row(static_cast<Eigen::Index>(d)) = forward(docs[d], model, Mode::kEval).prediction.y_hat.transpose();
  }
  return s;
}

inline EvalResult evaluate(const SwamModel& model, const std::vector<Document>& docs,
                           const std::vector<std::string>& codes, const std::vector<std::size_t>& n_list = {5},
                           double threshold = kDefaultThreshold) {
  return evaluate_scores(label_matrix(docs, model.config.num_labels), predict_scores(model, docs), codes, n_list,
                         threshold);
}

// ---------------------------------------------------------------------------
// Report file

namespace detail {
inline std::string fmt_metric(std::optional<double> v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << *v;
  return os.str();
}
}  // namespace detail

inline void write_eval_report(const EvalResult& e, std::ostream& os, const std::string& title = "evaluation") {
  using detail::fmt_metric;
  os << "# swam " << title << " report\n";
  os << "documents\t" << e.num_docs << "\n";
  os << "labels\t" << e.per_label.size() << "\n";
  os << "decision_rule\tpositive iff y_hat > " << fmt_metric(e.threshold) << "\n";
  os << "macro_f1_rule\tmean over all labels; P, R, F1 use 0/0 -> 0\n";
  os << "macro_auc_rule\tmean over labels having both positives and negatives; ties count 1/2\n";
  os << "auc_excluded\t" << e.auc_excluded_labels.size();
  for (auto& c : e.auc_excluded_labels) os << ' ' << c;
  os << "\n\n[summary]\n";
  os << "auc_macro\tauc_micro\tf1_macro\tf1_micro";
  for (auto& [n, v] : e.precision_at) os << "\tp@" << n;
  os << "\n" << fmt_metric(e.macro_auc) << '\t' << fmt_metric(e.micro_auc) << '\t' << fmt_metric(e.macro_f1) << '\t'
     << fmt_metric(e.micro_f1);
  for (auto& [n, v] : e.precision_at) os << '\t' << fmt_metric(v);
  os << "\n\n[zero_precision]\n" << e.zero_precision_labels.size();
  for (auto& c : e.zero_precision_labels) os << ' ' << c;
  os << "\n\n[per_label]\ncode\tsupport\ttp\tfp\tfn\tprecision\trecall\tf1\tauc\n";
  for (const auto& l : e.per_label) {
    os << l.code << '\t' << l.support << '\t' << l.counts.tp << '\t' << l.counts.fp << '\t' << l.counts.fn << '\t'
       << fmt_metric(l.precision) << '\t' << fmt_metric(l.recall) << '\t' << fmt_metric(l.f1) << '\t'
       << fmt_metric(l.auc) << '\n';
  }
}

}  // namespace swam

#endif  // SWAM_METRICS_HPP
