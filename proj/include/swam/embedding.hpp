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

// CBOW word embeddings with negative sampling, and the word2vec text format.

#ifndef SWAM_EMBEDDING_HPP
#define SWAM_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "swam/common.hpp"
#include "swam/corpus.hpp"

namespace swam {

// |V| x d_e word vectors. Row kPadId stays zero.
struct EmbeddingTable {
  Eigen::MatrixXd vectors;

  std::size_t rows() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  bool all_finite() const { return vectors.allFinite(); }
};

inline EmbeddingTable uniform_embeddings(std::size_t vocab_size, std::size_t dim, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  EmbeddingTable t{Eigen::MatrixXd(vocab_size, dim)};
  for (Eigen::Index r = 0; r < t.vectors.rows(); ++r)
    for (Eigen::Index c = 0; c < t.vectors.cols(); ++c) t.vectors(r, c) = u(rng);
  if (vocab_size > 0) t.vectors.row(kPadId).setZero();
  return t;
}

struct CbowConfig {
  std::size_t dim = 100;
  std::size_t context_window = 5;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double subsample_threshold = 1e-3;
  std::uint64_t seed = 1;
  // 1 is deterministic; more threads race on the shared tables.
  std::size_t threads = 1;
};

class CbowError : public Error {
 public:
  using Error::Error;
};

// Trainer state: input vectors (the embeddings) and output vectors used by
// the negative-sampling objective. Exposed so callers can observe the loss
// between epochs.
class CbowTrainer {
 public:
  CbowTrainer(const std::vector<Document>& docs, const Vocabulary& vocab, CbowConfig config)
      : docs_(docs), config_(config), rng_(make_rng(config.seed, "cbow")) {
    if (config_.context_window < 1) throw std::invalid_argument("CbowConfig: context_window must be >= 1");
    if (config_.negative_samples < 1) throw std::invalid_argument("CbowConfig: negative_samples must be >= 1");
    if (config_.threads < 1) config_.threads = 1;
    const std::size_t v = vocab.size();
    counts_.assign(v, 0);
    for (const auto& d : docs_) {
      for (auto id : d.token_ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= v) throw CbowError("token id outside vocabulary");
        if (id != kPadId) ++counts_[static_cast<std::size_t>(id)];
      }
    }
    for (auto c : counts_) total_ += c;
    if (total_ < 2 * config_.context_window + 1) {
      throw CbowError("corpus has " + std::to_string(total_) + " tokens, fewer than one context window (" +
                      std::to_string(2 * config_.context_window + 1) + ")");
    }
    Rng init = make_rng(config.seed, "cbow_init");
    input_ = uniform_embeddings(v, config_.dim, 0.5 / static_cast<double>(config_.dim), init).vectors;
    output_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(config_.dim));
    build_negative_table();
  }

  std::size_t epochs_done() const { return epoch_; }
  const Eigen::MatrixXd& input_vectors() const { return input_; }
  const Eigen::MatrixXd& output_vectors() const { return output_; }

  void run_epoch() {
    if (config_.threads == 1) {
      run_range(0, docs_.size(), rng_);
    } else {
      std::vector<std::thread> pool;
      const std::size_t n = docs_.size(), per = (n + config_.threads - 1) / config_.threads;
      for (std::size_t t = 0; t < config_.threads; ++t) {
        std::uint64_t s = rng_();
        pool.emplace_back([this, t, per, n, s] {
          Rng local(s);
          run_range(std::min(n, t * per), std::min(n, (t + 1) * per), local);
        });
      }
      for (auto& th : pool) th.join();
    }
    ++epoch_;
    if (!input_.allFinite() || !output_.allFinite()) throw CbowError("non-finite embedding after CBOW epoch");
  }

  EmbeddingTable train() {
    while (epoch_ < config_.epochs) run_epoch();
    return table();
  }

  EmbeddingTable table() const { return EmbeddingTable{input_}; }

  // Mean negative-sampling loss over every (context, center) pair of `batch`,
  // with negatives drawn from a fixed seed so repeated calls are comparable.
  double loss(const std::vector<Document>& batch, std::uint64_t seed) const {
    Rng rng(seed);
    double total = 0.0;
    std::size_t pairs = 0;
    Eigen::VectorXd h(static_cast<Eigen::Index>(config_.dim));
    for (const auto& d : batch) {
      for (std::size_t pos = 0; pos < d.token_ids.size(); ++pos) {
        if (!context(d, pos, config_.context_window, h)) continue;
        auto center = d.token_ids[pos];
        total += softplus(-output_.row(center).dot(h));
        for (std::size_t k = 0; k < config_.negative_samples; ++k) {
          auto neg = draw_negative(rng);
          if (neg == center) continue;
          total += softplus(output_.row(neg).dot(h));
        }
        ++pairs;
      }
    }
    return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
  }

 private:
  static double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
  static double sigmoid(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }

  void build_negative_table() {
    constexpr std::size_t kTableSize = 1 << 20;
    double norm = 0.0;
    for (std::size_t i = 1; i < counts_.size(); ++i) norm += std::pow(static_cast<double>(counts_[i]), 0.75);
    table_.reserve(kTableSize);
    double cum = 0.0;
    std::size_t i = 1;
    for (std::size_t a = 0; a < kTableSize; ++a) {
      double target = (static_cast<double>(a) + 0.5) / kTableSize;
      while (i + 1 < counts_.size() && cum + std::pow(static_cast<double>(counts_[i]), 0.75) / norm < target) {
        cum += std::pow(static_cast<double>(counts_[i]), 0.75) / norm;
        ++i;
      }
      table_.push_back(static_cast<TokenId>(i));
    }
  }

  TokenId draw_negative(Rng& rng) const {
    return table_[std::uniform_int_distribution<std::size_t>(0, table_.size() - 1)(rng)];
  }

  // Mean of the non-PAD input vectors within `window` of pos. False when the
  // center is PAD or there is no usable context word.
  bool context(const Document& d, std::size_t pos, std::size_t window, Eigen::VectorXd& h) const {
    if (d.token_ids[pos] == kPadId) return false;
    h.setZero();
    std::size_t n = 0;
    const std::size_t lo = pos >= window ? pos - window : 0;
    const std::size_t hi = std::min(d.token_ids.size(), pos + window + 1);
    for (std::size_t c = lo; c < hi; ++c) {
      if (c == pos || d.token_ids[c] == kPadId) continue;
      h += input_.row(d.token_ids[c]).transpose();
      ++n;
    }
    if (n == 0) return false;
    h /= static_cast<double>(n);
    return true;
  }

  void run_range(std::size_t begin, std::size_t end, Rng& rng) {
    const double t = config_.subsample_threshold * static_cast<double>(total_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> shrink(0, config_.context_window - 1);
    const double budget = static_cast<double>(config_.epochs) * static_cast<double>(total_) + 1.0;
    Eigen::VectorXd h(static_cast<Eigen::Index>(config_.dim));
    Eigen::VectorXd grad_h(static_cast<Eigen::Index>(config_.dim));
    std::vector<TokenId> kept;
    for (std::size_t di = begin; di < end; ++di) {
      const auto& src = docs_[di];
      kept.clear();
      for (auto id : src.token_ids) {
        if (id == kPadId) continue;
        double f = static_cast<double>(counts_[static_cast<std::size_t>(id)]);
        double keep = config_.subsample_threshold > 0 ? (std::sqrt(f / t) + 1.0) * t / f : 1.0;
        if (keep >= 1.0 || unit(rng) < keep) kept.push_back(id);
      }
      Document d{src.doc_id, kept, {}};
      for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        double lr = config_.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed_) / budget);
        ++processed_;
        std::size_t window = config_.context_window - shrink(rng);
        if (!context(d, pos, window, h)) continue;
        grad_h.setZero();
        const TokenId center = kept[pos];
        for (std::size_t k = 0; k <= config_.negative_samples; ++k) {
          TokenId target = k == 0 ? center : draw_negative(rng);
          if (k > 0 && target == center) continue;
          double label = k == 0 ? 1.0 : 0.0;
          double g = (label - sigmoid(output_.row(target).dot(h))) * lr;
          grad_h += g * output_.row(target).transpose();
          output_.row(target) += g * h.transpose();
        }
        const std::size_t lo = pos >= window ? pos - window : 0;
        const std::size_t hi = std::min(kept.size(), pos + window + 1);
        for (std::size_t c = lo; c < hi; ++c) {
          if (c != pos) input_.row(kept[c]) += grad_h.transpose();
        }
      }
    }
    input_.row(kPadId).setZero();
  }

  const std::vector<Document>& docs_;
  CbowConfig config_;
  Rng rng_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
  std::size_t processed_ = 0;
  std::size_t epoch_ = 0;
  std::vector<TokenId> table_;
  Eigen::MatrixXd input_;
  Eigen::MatrixXd output_;
};

inline EmbeddingTable train_cbow(const std::vector<Document>& docs, const Vocabulary& vocab,
                                 const CbowConfig& config) {
  return CbowTrainer(docs, vocab, config).train();
}

inline double cosine(const EmbeddingTable& t, TokenId a, TokenId b) {
  auto va = t.vectors.row(a), vb = t.vectors.row(b);
  double denom = va.norm() * vb.norm();
  return denom == 0.0 ? 0.0 : va.dot(vb) / denom;
}

// ---------------------------------------------------------------------------
// Text format: "|V| d_e" header, then "token v1 ... v_de" per row.

inline void save_embeddings(const EmbeddingTable& table, const Vocabulary& vocab, const std::string& path) {
  if (table.rows() != vocab.size()) throw Error("save_embeddings: table rows do not match vocabulary size");
  auto out = open_for_write(path);
  out << table.rows() << ' ' << table.dim() << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << vocab.tokens()[r];
    for (std::size_t c = 0; c < table.dim(); ++c) {
      out << ' ' << format_double(table.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    out << '\n';
  }
}

struct LoadedEmbeddings {
  EmbeddingTable table;
  std::vector<std::string> missing;  // vocabulary tokens absent from the file (random init)
  std::size_t ignored = 0;           // file rows whose token is not in the vocabulary
};

// Reads a word2vec text file and aligns it to `vocab`. Vocabulary tokens not
// in the file get uniform(-0.05, 0.05) vectors and are listed in `missing`.
// `expected_dim` of 0 accepts whatever the header declares.
inline LoadedEmbeddings load_embeddings(const std::string& path, const Vocabulary& vocab,
                                        std::size_t expected_dim = 0, std::uint64_t seed = 1) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path, 1, "missing header");
  std::istringstream hs(line);
  std::size_t n_rows = 0, dim = 0;
  std::string extra;
  if (!(hs >> n_rows >> dim) || (hs >> extra)) throw FormatError(path, 1, "header must be '<rows> <dim>'");
  if (dim == 0) throw FormatError(path, 1, "dimension must be positive");
  if (expected_dim != 0 && dim != expected_dim) {
    throw FormatError(path, 1,
                      "dimension " + std::to_string(dim) + " does not match expected " + std::to_string(expected_dim));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(dim));
  std::vector<bool> seen(vocab.size(), false);
  LoadedEmbeddings result;
  std::size_t lineno = 1, rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<double> values;
    std::string field;
    while (ls >> field) {
      double v = 0;
      if (!parse_double(field, v)) throw FormatError(path, lineno, "bad number '" + field + "'");
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw FormatError(path, lineno,
                        "expected " + std::to_string(dim) + " values, found " + std::to_string(values.size()));
    }
    ++rows;
    if (!vocab.contains(token)) {
      ++result.ignored;
      continue;
    }
    auto id = static_cast<Eigen::Index>(vocab.lookup(token));
    for (std::size_t c = 0; c < dim; ++c) m(id, static_cast<Eigen::Index>(c)) = values[c];
    seen[static_cast<std::size_t>(id)] = true;
  }
  if (rows != n_rows) {
    throw FormatError(path, lineno,
                      "header declares " + std::to_string(n_rows) + " rows, file has " + std::to_string(rows));
  }
  Rng rng = make_rng(seed, "embedding_fill");
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (std::size_t r = 0; r < vocab.size(); ++r) {
    if (seen[r] || r == static_cast<std::size_t>(kPadId)) continue;
    result.missing.push_back(vocab.tokens()[r]);
    for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = u(rng);
  }
  m.row(kPadId).setZero();
  if (!m.allFinite()) throw FormatError(path, lineno, "non-finite embedding value");
  result.table.vectors = std::move(m);
  return result;
}

}  // namespace swam

#endif  // SWAM_EMBEDDING_HPP
