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

// Explanations: the most-attended snippet per (document, label), the
// corpus-wide census of what each convolution filter responds to, and
// zero-precision comparisons between two evaluations.

#ifndef SWAM_EXPLAIN_HPP
#define SWAM_EXPLAIN_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "swam/corpus.hpp"
#include "swam/metrics.hpp"
#include "swam/model.hpp"

namespace swam {

inline constexpr std::size_t kSnippetContext = 8;

struct Snippet {
  std::string code;
  std::size_t label = 0;
  std::string doc_id;
  double y_hat = 0;
  std::size_t position = 0;  // argmax of alpha_l
  double attention = 0;      // alpha_l at `position` (per_label only)
  std::vector<std::string> tokens;  // window [position, position + k - 1], clipped to the document
  std::vector<std::string> context_before;
  std::vector<std::string> context_after;
  // max_pool variant: position comes from the argmax column of `filter`,
  // the filter contributing most to the label's logit.
  bool variant_specific = false;
  std::optional<std::size_t> filter;
};

struct SnippetRequest {
  std::vector<std::size_t> labels;  // explicit labels; empty means all with y_hat > threshold
  double threshold = kDefaultThreshold;
  std::size_t context = kSnippetContext;
};

inline std::size_t argmax_first(const Eigen::RowVectorXd& row) {
  Eigen::Index best = 0;
  for (Eigen::Index n = 1; n < row.size(); ++n)
    if (row(n) > row(best)) best = n;
  return static_cast<std::size_t>(best);
}

inline std::vector<Snippet> extract_snippets(const SwamModel& model, const Prediction& pred, const Document& doc,
                                             const Vocabulary& vocab, const std::vector<std::string>& codes,
                                             const SnippetRequest& req = {}) {
  const auto& c = model.config;
  const std::size_t n_tokens = doc.token_ids.size();
  std::vector<std::size_t> labels = req.labels;
  if (labels.empty()) {
    for (std::size_t l = 0; l < c.num_labels; ++l)
      if (pred.y_hat(static_cast<Eigen::Index>(l)) > req.threshold) labels.push_back(l);
  }
  std::vector<Snippet> out;
  for (auto l : labels) {
    if (l >= c.num_labels) throw std::invalid_argument("extract_snippets: label out of range");
    const auto li = static_cast<Eigen::Index>(l);
    Snippet s;
    s.code = codes.at(l);
    s.label = l;
    s.doc_id = doc.doc_id;
    s.y_hat = pred.y_hat(li);
    if (c.variant == AttentionVariant::kPerLabel) {
      s.position = argmax_first(pred.attention.row(li));
      s.attention = pred.attention(li, static_cast<Eigen::Index>(s.position));
    } else {
      Eigen::RowVectorXd contrib = model.params.output_w.row(li).cwiseProduct(pred.doc_vectors.row(0));
      const std::size_t j = argmax_first(contrib);
      s.filter = j;
      s.position = static_cast<std::size_t>(pred.argmax.at(j));
      s.variant_specific = true;
    }
    const std::size_t end = std::min(n_tokens, s.position + c.filter_width);
    for (std::size_t i = s.position; i < end; ++i) s.tokens.push_back(vocab.token(doc.token_ids[i]));
    for (std::size_t i = s.position >= req.context ? s.position - req.context : 0; i < s.position; ++i) {
      s.context_before.push_back(vocab.token(doc.token_ids[i]));
    }
    for (std::size_t i = end; i < std::min(n_tokens, end + req.context); ++i) {
      s.context_after.push_back(vocab.token(doc.token_ids[i]));
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {
inline std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}
}  // namespace detail

inline void write_snippet_report(const std::vector<Snippet>& snippets, std::ostream& os) {
  os << "code\ty_hat\tdoc_id\tposition\tattention\tsnippet\tcontext\n";
  for (const auto& s : snippets) {
    os << s.code << '\t' << detail::fmt_metric(s.y_hat) << '\t' << s.doc_id << '\t' << s.position << '\t'
       << (s.variant_specific ? "max_pool:filter=" + std::to_string(*s.filter) : detail::fmt_metric(s.attention))
       << '\t' << detail::join(s.tokens) << '\t' << "... " << detail::join(s.context_before) << " [["
       << detail::join(s.tokens) << "]] " << detail::join(s.context_after) << " ...\n";
  }
}

// ---------------------------------------------------------------------------
// Filter census

struct KGramHit {
  double activation = 0;
  std::vector<TokenId> ids;  // receptive field of the column; PAD outside the document
  std::size_t doc_index = 0;
  std::size_t position = 0;
};

struct FilterReport {
  std::size_t filter = 0;
  std::vector<KGramHit> top;                            // distinct k-grams, activation descending
  std::vector<std::pair<std::size_t, double>> labels;   // (label, weight) by |weight| descending
  bool degenerate = false;                              // identical activation everywhere
};

// Receptive field of output column `pos`: tokens pos - pad_left .. pos + pad_right.
inline std::vector<TokenId> receptive_field(const Document& doc, std::size_t pos, const ModelConfig& c) {
  std::vector<TokenId> ids;
  const auto left = static_cast<std::ptrdiff_t>(c.pad_left());
  for (std::size_t j = 0; j < c.filter_width; ++j) {
    const auto src = static_cast<std::ptrdiff_t>(pos + j) - left;
    ids.push_back(src >= 0 && src < static_cast<std::ptrdiff_t>(doc.token_ids.size())
                      ? doc.token_ids[static_cast<std::size_t>(src)]
                      : kPadId);
  }
  return ids;
}

// Scans every column of every document's base representation and keeps,
// per filter, the `m` distinct k-grams with the highest activation. Filters
// are associated with labels by |U[l, j]| (per_label) or |B[l, j]| (max_pool).
inline std::vector<FilterReport> filter_census(const SwamModel& model, const std::vector<Document>& docs, std::size_t m,
                                               std::size_t labels_per_filter = 3) {
  if (m < 1) throw std::invalid_argument("filter_census: m must be >= 1");
  const auto& c = model.config;
  const std::size_t dc = c.num_filters;
  std::vector<FilterReport> reports(dc);
  std::vector<double> lo(dc, std::numeric_limits<double>::infinity()), hi(dc, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < dc; ++j) reports[j].filter = j;

  for (std::size_t di = 0; di < docs.size(); ++di) {
    const auto& doc = docs[di];
    Eigen::MatrixXd h = convolve(embed(doc.token_ids, model.params.embedding), model.params.conv_w,
                                 model.params.conv_b, c.filter_width);
    for (std::size_t pos = 0; pos < doc.token_ids.size(); ++pos) {
      std::optional<std::vector<TokenId>> ids;
      for (std::size_t j = 0; j < dc; ++j) {
        const double a = h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(pos));
        lo[j] = std::min(lo[j], a);
        hi[j] = std::max(hi[j], a);
        auto& top = reports[j].top;
        if (top.size() == m && a <= top.back().activation) continue;
        if (!ids) ids = receptive_field(doc, pos, c);
        auto same = std::find_if(top.begin(), top.end(), [&](const KGramHit& k) { return k.ids == *ids; });
        if (same != top.end()) {
          if (a <= same->activation) continue;
          top.erase(same);
        } else if (top.size() == m) {
          top.pop_back();
        }
        KGramHit hit{a, *ids, di, pos};
        auto where = std::upper_bound(top.begin(), top.end(), a,
                                      [](double v, const KGramHit& k) { return v > k.activation; });
        top.insert(where, std::move(hit));
      }
    }
  }
  const Eigen::MatrixXd& assoc = c.variant == AttentionVariant::kPerLabel ? model.params.attention : model.params.output_w;
  for (std::size_t j = 0; j < dc; ++j) {
    reports[j].degenerate = docs.empty() || lo[j] == hi[j];
    std::vector<std::pair<std::size_t, double>> w;
    for (std::size_t l = 0; l < c.num_labels; ++l) w.emplace_back(l, assoc(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)));
    std::stable_sort(w.begin(), w.end(), [](auto& a, auto& b) { return std::abs(a.second) > std::abs(b.second); });
    w.resize(std::min(labels_per_filter, w.size()));
    reports[j].labels = std::move(w);
  }
  return reports;
}

inline void write_census_report(const std::vector<FilterReport>& reports, const std::vector<Document>& docs,
                                const Vocabulary& vocab, const std::vector<std::string>& codes, std::ostream& os) {
  os << "filter\tdegenerate\ttop_labels\trank\tactivation\tkgram\tdoc_id\tposition\n";
  for (const auto& r : reports) {
    std::string labels;
    for (auto& [l, w] : r.labels) labels += (labels.empty() ? "" : ",") + codes.at(l) + ":" + detail::fmt_metric(w);
    for (std::size_t i = 0; i < r.top.size(); ++i) {
      const auto& k = r.top[i];
      std::vector<std::string> toks;
      for (auto id : k.ids) toks.push_back(vocab.token(id));
      os << r.filter << '\t' << (r.degenerate ? 1 : 0) << '\t' << labels << '\t' << i + 1 << '\t'
         << detail::fmt_metric(k.activation) << '\t' << detail::join(toks) << '\t' << docs.at(k.doc_index).doc_id << '\t'
         << k.position << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Planted-snippet diagnostics for synthetic corpora

inline std::vector<TokenId> to_ids(const NGram& g, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  for (const auto& w : g) ids.push_back(vocab.lookup(w));
  return ids;
}

inline bool contains_subsequence(const std::vector<TokenId>& hay, const std::vector<TokenId>& needle) {
  return !needle.empty() && std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

struct OverlapStats {
  std::size_t pairs = 0;     // (doc, label) with y_hat > threshold and a planted trigger in the doc
  std::size_t overlaps = 0;  // snippet window shares a token position with a planted trigger
  double rate() const { return pairs == 0 ? 0.0 : static_cast<double>(overlaps) / static_cast<double>(pairs); }
};

// For every true-positive-predicted (doc, label) whose document contains one
// of the label's planted triggers, checks whether the extracted snippet
// window overlaps an occurrence of such a trigger.
inline OverlapStats snippet_trigger_overlap(const SwamModel& model, const std::vector<Document>& docs,
                                            const Vocabulary& vocab, const std::vector<std::string>& codes,
                                            const SyntheticSpec& spec, double threshold = kDefaultThreshold) {
  OverlapStats st;
  std::vector<std::vector<std::vector<TokenId>>> trig(spec.num_labels);
  for (std::size_t l = 0; l < spec.num_labels; ++l)
    for (const auto& g : spec.label_triggers[l]) trig[l].push_back(to_ids(g, vocab));
  for (const auto& doc : docs) {
    auto pred = forward(doc, model, Mode::kEval).prediction;
    SnippetRequest req;
    req.threshold = threshold;
    for (const auto& s : extract_snippets(model, pred, doc, vocab, codes, req)) {
      if (!doc.labels[s.label]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      for (const auto& t : trig[s.label]) {
        for (std::size_t i = 0; i + t.size() <= doc.token_ids.size(); ++i) {
          if (std::equal(t.begin(), t.end(), doc.token_ids.begin() + static_cast<std::ptrdiff_t>(i))) spans.emplace_back(i, i + t.size());
        }
      }
      if (spans.empty()) continue;
      ++st.pairs;
      const std::size_t a = s.position, b = s.position + s.tokens.size();
      if (std::any_of(spans.begin(), spans.end(), [&](auto& sp) { return a < sp.second && sp.first < b; })) ++st.overlaps;
    }
  }
  return st;
}

// Fraction of labels for which some filter's top k-gram contains one of the
// label's planted triggers.
inline double census_trigger_recovery(const std::vector<FilterReport>& reports, const Vocabulary& vocab,
                                      const SyntheticSpec& spec, std::vector<std::size_t>* missed = nullptr) {
  std::size_t found = 0;
  for (std::size_t l = 0; l < spec.num_labels; ++l) {
    bool hit = false;
    for (const auto& g : spec.label_triggers[l]) {
      const auto ids = to_ids(g, vocab);
      for (const auto& r : reports) {
        if (!r.top.empty() && contains_subsequence(r.top.front().ids, ids)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) {
      ++found;
    } else if (missed) {
      missed->push_back(l);
    }
  }
  return spec.num_labels == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(spec.num_labels);
}

// ---------------------------------------------------------------------------
// Zero-precision comparison

struct ZeroPrecisionDiff {
  std::vector<std::string> zero_a, zero_b;
  std::vector<std::string> both;
  std::vector<std::string> only_a;  // recovered in b
  std::vector<std::string> only_b;  // lost in b
  bool same() const { return only_a.empty() && only_b.empty(); }
};

inline ZeroPrecisionDiff compare_zero_precision(const EvalResult& a, const EvalResult& b) {
  if (a.label_codes() != b.label_codes()) throw Error("compare_zero_precision: label spaces differ");
  ZeroPrecisionDiff d;
  d.zero_a = a.zero_precision_labels;
  d.zero_b = b.zero_precision_labels;
  std::set<std::string> sa(d.zero_a.begin(), d.zero_a.end()), sb(d.zero_b.begin(), d.zero_b.end());
  for (const auto& code : a.label_codes()) {
    const bool in_a = sa.count(code) > 0, in_b = sb.count(code) > 0;
    if (in_a && in_b) d.both.push_back(code);
    if (in_a && !in_b) d.only_a.push_back(code);
    if (!in_a && in_b) d.only_b.push_back(code);
  }
  return d;
}

}  // namespace swam

#endif  // SWAM_EXPLAIN_HPP
