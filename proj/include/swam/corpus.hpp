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

// Text preprocessing, vocabularies, label spaces, document encoding and the
// planted-snippet synthetic corpus generator.

#ifndef SWAM_CORPUS_HPP
#define SWAM_CORPUS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "swam/common.hpp"

namespace swam {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

class EmptyCorpusError : public Error {
 public:
  EmptyCorpusError() : Error("corpus is empty") {}
};

class EmptyDocumentError : public Error {
 public:
  explicit EmptyDocumentError(const std::string& doc_id)
      : Error("document '" + doc_id + "' has no tokens after preprocessing"), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

struct RawRecord {
  std::string doc_id;
  std::set<std::string> label_codes;
  std::string text;
};

// ---------------------------------------------------------------------------
// Tokenization

namespace detail {

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes
// decode as U+FFFD.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b = static_cast<unsigned char>(s[i]);
  int extra = b < 0x80 ? 0 : (b >> 5) == 0x6 ? 1 : (b >> 4) == 0xe ? 2 : (b >> 3) == 0x1e ? 3 : -1;
  if (extra < 0 || i + extra >= s.size() + (extra == 0 ? 1 : 0)) {
    ++i;
    return extra == 0 ? b : 0xfffd;
  }
  char32_t cp = extra == 0 ? b : b & (0x3f >> extra);
  for (int k = 1; k <= extra; ++k) {
    auto c = static_cast<unsigned char>(s[i + k]);
    if ((c >> 6) != 0x2) {
      ++i;
      return 0xfffd;
    }
    cp = (cp << 6) | (c & 0x3f);
  }
  i += extra + 1;
  return cp;
}

// Letter test over the scripts that matter for clinical text. Not a full
// Unicode table: covers Latin, Greek, Cyrillic, Hebrew, Arabic and CJK.
inline bool is_letter(char32_t c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  if (c < 0xc0) return c == 0xaa || c == 0xb5 || c == 0xba;
  if (c <= 0x24f) return c != 0xd7 && c != 0xf7;
  return (c >= 0x370 && c <= 0x3ff && c != 0x37e && c != 0x387) || (c >= 0x400 && c <= 0x52f) ||
         (c >= 0x5d0 && c <= 0x5ea) || (c >= 0x620 && c <= 0x64a) || (c >= 0x1e00 && c <= 0x1fff) ||
         (c >= 0x3040 && c <= 0x30ff) || (c >= 0x4e00 && c <= 0x9fff) || (c >= 0xac00 && c <= 0xd7a3);
}

inline bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

inline bool has_letter(std::string_view tok) {
  for (std::size_t i = 0; i < tok.size();) {
    if (is_letter(next_code_point(tok, i))) return true;
  }
  return false;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// Lowercases, splits on whitespace, strips punctuation from token edges and
// drops tokens that contain no letter ("100" goes, "100ml" stays).
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view raw = text.substr(start, i - start);
    while (!raw.empty() && detail::is_ascii_punct(raw.front())) raw.remove_prefix(1);
    while (!raw.empty() && detail::is_ascii_punct(raw.back())) raw.remove_suffix(1);
    if (raw.empty() || !detail::has_letter(raw)) continue;
    std::string tok(raw);
    for (char& c : tok) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Vocabulary

class Vocabulary {
 public:
  Vocabulary() {
    index_to_token_ = {std::string(kPadToken), std::string(kUnkToken)};
    doc_freq_ = {0, 0};
    token_to_index_.emplace(kPadToken, kPadId);
    token_to_index_.emplace(kUnkToken, kUnkId);
  }

  // Tokens must be sorted and unique; indices are assigned from 2 upwards.
  static Vocabulary from_tokens(const std::vector<std::pair<std::string, std::size_t>>& tokens,
                                std::size_t min_doc_freq) {
    Vocabulary v;
    v.min_doc_freq_ = min_doc_freq;
    for (const auto& [tok, df] : tokens) {
      if (tok == kPadToken || tok == kUnkToken) throw Error("reserved token in vocabulary: " + tok);
      if (!v.token_to_index_.emplace(tok, static_cast<TokenId>(v.index_to_token_.size())).second) {
        throw Error("duplicate vocabulary token: " + tok);
      }
      v.index_to_token_.push_back(tok);
      v.doc_freq_.push_back(df);
    }
    return v;
  }

  std::size_t size() const { return index_to_token_.size(); }
  std::size_t min_doc_freq() const { return min_doc_freq_; }

  TokenId lookup(std::string_view token) const {
    auto it = token_to_index_.find(std::string(token));
    return it == token_to_index_.end() ? kUnkId : it->second;
  }
  bool contains(std::string_view token) const { return token_to_index_.count(std::string(token)) > 0; }

  const std::string& token(TokenId id) const { return index_to_token_.at(static_cast<std::size_t>(id)); }
  std::size_t doc_freq(TokenId id) const { return doc_freq_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return index_to_token_; }

  bool operator==(const Vocabulary& o) const {
    return index_to_token_ == o.index_to_token_ && doc_freq_ == o.doc_freq_;
  }

 private:
  std::vector<std::string> index_to_token_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, TokenId> token_to_index_;
  std::size_t min_doc_freq_ = 1;
};

// Keeps exactly the tokens that occur in at least `min_doc_freq` distinct
// training documents. Index order is lexicographic, so the result does not
// depend on record order.
inline Vocabulary build_vocabulary(const std::vector<RawRecord>& records, std::size_t min_doc_freq) {
  if (min_doc_freq < 1) throw std::invalid_argument("build_vocabulary: min_doc_freq must be >= 1");
  if (records.empty()) throw EmptyCorpusError();
  std::map<std::string, std::size_t> df;
  for (const auto& r : records) {
    auto toks = tokenize(r.text);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++df[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : df) {
    if (n >= min_doc_freq && tok != kPadToken && tok != kUnkToken) kept.emplace_back(tok, n);
  }
  return Vocabulary::from_tokens(kept, min_doc_freq);
}

inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.tokens()[i] << '\t' << i << '\t' << vocab.doc_freq(static_cast<TokenId>(i)) << '\n';
  }
}

inline Vocabulary load_vocabulary(const std::string& path, std::size_t min_doc_freq = 1) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file: " + path);
  std::vector<std::pair<std::string, std::size_t>> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 3) throw FormatError(path, lineno, "expected token<TAB>index<TAB>doc_freq");
    std::size_t idx = 0, df = 0;
    try {
      idx = std::stoul(f[1]);
      df = std::stoul(f[2]);
    } catch (const std::exception&) {
      throw FormatError(path, lineno, "non-numeric index or doc_freq");
    }
    if (idx != lineno - 1) throw FormatError(path, lineno, "indices must be consecutive from 0");
    if (idx == kPadId || idx == kUnkId) {
      if (f[0] != (idx == kPadId ? kPadToken : kUnkToken)) throw FormatError(path, lineno, "bad reserved token");
      continue;
    }
    tokens.emplace_back(f[0], df);
  }
  if (lineno < 2) throw FormatError(path, lineno, "missing reserved PAD/UNK rows");
  return Vocabulary::from_tokens(tokens, min_doc_freq);
}

// ---------------------------------------------------------------------------
// Label space

class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> codes, std::vector<std::string> descriptions = {})
      : codes_(std::move(codes)), descriptions_(std::move(descriptions)) {
    descriptions_.resize(codes_.size());
    for (std::size_t i = 0; i < codes_.size(); ++i) {
      if (!index_.emplace(codes_[i], i).second) throw Error("duplicate label code: " + codes_[i]);
    }
  }

  std::size_t size() const { return codes_.size(); }
  const std::vector<std::string>& codes() const { return codes_; }
  const std::string& code(std::size_t i) const { return codes_.at(i); }
  const std::string& description(std::size_t i) const { return descriptions_.at(i); }
  std::optional<std::size_t> find(const std::string& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool operator==(const LabelSpace& o) const { return codes_ == o.codes_; }

  std::string hash() const {
    std::string joined;
    for (const auto& c : codes_) joined += c + '\n';
    return sha256_hex(joined);
  }

 private:
  std::vector<std::string> codes_;
  std::vector<std::string> descriptions_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline void save_label_space(const LabelSpace& space, const std::string& path) {
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.code(i);
    if (!space.description(i).empty()) out << '\t' << space.description(i);
    out << '\n';
  }
}

inline LabelSpace load_label_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label space file: " + path);
  std::vector<std::string> codes, desc;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::string code = line.substr(0, tab);
    if (!seen.insert(code).second) throw FormatError(path, lineno, "duplicate label code " + code);
    codes.push_back(code);
    desc.push_back(tab == std::string::npos ? "" : line.substr(tab + 1));
  }
  return LabelSpace(std::move(codes), std::move(desc));
}

// The `k` most frequent codes across `records`; ties broken by code string.
inline LabelSpace top_k_label_space(const std::vector<RawRecord>& records, std::size_t k) {
  std::map<std::string, std::size_t> freq;
  for (const auto& r : records)
    for (const auto& c : r.label_codes) ++freq[c];
  std::vector<std::pair<std::string, std::size_t>> v(freq.begin(), freq.end());
  std::stable_sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.second > b.second; });
  if (v.size() > k) v.resize(k);
  std::vector<std::string> codes;
  for (auto& [c, n] : v) codes.push_back(c);
  return LabelSpace(std::move(codes));
}

// Drops records carrying no code from `space` (the "at least one of the top
// codes" filter).
inline std::vector<RawRecord> filter_to_label_space(const std::vector<RawRecord>& records,
                                                    const LabelSpace& space) {
  std::vector<RawRecord> out;
  for (const auto& r : records) {
    if (std::any_of(r.label_codes.begin(), r.label_codes.end(),
                    [&](const std::string& c) { return space.find(c).has_value(); })) {
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus files: doc_id<TAB>code1,code2,...<TAB>raw text

inline std::vector<RawRecord> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  std::vector<RawRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw FormatError(path, lineno, "expected doc_id<TAB>codes<TAB>text");
    RawRecord r;
    r.doc_id = line.substr(0, t1);
    if (r.doc_id.empty()) throw FormatError(path, lineno, "empty doc_id");
    if (!ids.insert(r.doc_id).second) throw FormatError(path, lineno, "duplicate doc_id " + r.doc_id);
    for (auto& c : detail::split(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), ',')) {
      if (!c.empty()) r.label_codes.insert(c);
    }
    r.text = line.substr(t2 + 1);
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_corpus(const std::vector<RawRecord>& records, const std::string& path) {
  auto out = open_for_write(path);
  for (const auto& r : records) {
    out << r.doc_id << '\t';
    bool first = true;
    for (const auto& c : r.label_codes) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\t' << r.text << '\n';
  }
}

// ---------------------------------------------------------------------------
// Encoded documents

struct Document {
  std::string doc_id;
  std::vector<TokenId> token_ids;
  std::vector<std::uint8_t> labels;  // one entry per label in the label space

  std::size_t length() const { return token_ids.size(); }
};

// Maps tokens to vocabulary ids (unknown -> UNK), keeps the first `max_len`
// tokens and binarizes labels in label-space order. Codes outside the label
// space are ignored.
inline Document encode(const RawRecord& record, const Vocabulary& vocab, const LabelSpace& space,
                       std::size_t max_len) {
  if (max_len < 1) throw std::invalid_argument("encode: max_len must be >= 1");
  auto toks = tokenize(record.text);
  if (toks.empty()) throw EmptyDocumentError(record.doc_id);
  Document d;
  d.doc_id = record.doc_id;
  std::size_t n = std::min(toks.size(), max_len);
  d.token_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.token_ids.push_back(vocab.lookup(toks[i]));
  d.labels.assign(space.size(), 0);
  for (const auto& c : record.label_codes) {
    if (auto idx = space.find(c)) d.labels[*idx] = 1;
  }
  return d;
}

inline std::vector<Document> encode_all(const std::vector<RawRecord>& records, const Vocabulary& vocab,
                                        const LabelSpace& space, std::size_t max_len) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(encode(r, vocab, space, max_len));
  return docs;
}

inline std::vector<std::string> decode(const Document& doc, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(doc.token_ids.size());
  for (auto id : doc.token_ids) out.push_back(vocab.token(id));
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and shuffling

struct SplitRatios {
  double train = 0.71;
  double validation = 0.14;
};

struct CorpusSplit {
  std::vector<RawRecord> train;
  std::vector<RawRecord> validation;
  std::vector<RawRecord> test;
  std::vector<std::string> no_train_positive;  // labels with zero positives in train
  std::vector<std::string> no_positive;        // labels with zero positives anywhere
};

// Disjoint exhaustive split, deterministic in `seed`. Train and validation
// sizes are round(n * ratio); test takes the rest.
inline CorpusSplit split_corpus(const std::vector<RawRecord>& records, const LabelSpace& space,
                                std::uint64_t seed, SplitRatios ratios = {}) {
  if (records.empty()) throw EmptyCorpusError();
  const std::size_t n = records.size();
  auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.train));
  auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.validation));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);

  CorpusSplit s;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[order[i]];
    (i < n_train ? s.train : i < n_train + n_val ? s.validation : s.test).push_back(r);
  }
  std::set<std::string> in_train, anywhere;
  for (const auto& r : s.train) in_train.insert(r.label_codes.begin(), r.label_codes.end());
  for (const auto& r : records) anywhere.insert(r.label_codes.begin(), r.label_codes.end());
  for (const auto& c : space.codes()) {
    if (!in_train.count(c)) s.no_train_positive.push_back(c);
    if (!anywhere.count(c)) s.no_positive.push_back(c);
  }
  return s;
}

template <typename T>
std::vector<T> shuffle_training(std::vector<T> items, std::uint64_t seed) {
  Rng rng = make_rng(seed, "shuffle");
  std::shuffle(items.begin(), items.end(), rng);
  return items;
}

// ---------------------------------------------------------------------------
// Synthetic planted-snippet corpora

using NGram = std::vector<std::string>;

struct GenericTrigger {
  NGram ngram;
  std::vector<std::size_t> labels;  // label indices this snippet is informative for
};

struct SyntheticSpec {
  std::size_t num_labels = 50;
  std::vector<std::vector<NGram>> label_triggers;  // non-generic snippets, per label
  std::vector<GenericTrigger> generic_triggers;
  // Chance that a positive of a label also carries each generic trigger
  // listing that label.
  double generic_rate = 0.5;
  std::size_t filler_vocab_size = 400;
  std::size_t min_length = 40;  // document length in tokens, uniform in [min, max]
  std::size_t max_length = 80;
  double label_prior = 0.1;
  // Fraction of non-generic trigger occurrences whose label is withheld.
  double noise_rate = 0.0;
  std::size_t min_labels_per_doc = 1;

  std::size_t max_ngram_length() const {
    std::size_t m = 0;
    for (const auto& ts : label_triggers)
      for (const auto& t : ts) m = std::max(m, t.size());
    for (const auto& g : generic_triggers) m = std::max(m, g.ngram.size());
    return m;
  }
};

inline std::string synthetic_label_code(std::size_t i) {
  std::ostringstream os;
  os << 'L' << std::setw(3) << std::setfill('0') << i;
  return os.str();
}

// Deterministic alphabetic token with a prefix, e.g. ("fz", 27) -> "fzbb".
inline std::string synthetic_word(std::string_view prefix, std::size_t i, std::size_t width = 3) {
  std::string s(width, 'a');
  for (std::size_t k = 0; k < width; ++k) {
    s[width - 1 - k] = static_cast<char>('a' + i % 26);
    i /= 26;
  }
  return std::string(prefix) + s;
}

inline std::string filler_token(std::size_t i) { return synthetic_word("fz", i); }

struct PlantedSpecOptions {
  std::size_t num_labels = 50;
  std::size_t num_triggers = 60;  // non-generic; spread round-robin over labels
  std::size_t ngram_length = 2;
  // Distinct words triggers are assembled from. Fewer words than triggers
  // means words are shared and only the full n-gram identifies its label.
  std::size_t word_pool = 0;  // 0: every trigger gets fresh words
  std::size_t num_generic = 0;
  std::size_t labels_per_generic = 3;
  std::uint64_t seed = 0;
};

// Builds a SyntheticSpec with distinct planted n-grams.
inline SyntheticSpec make_planted_spec(const PlantedSpecOptions& o) {
  if (o.num_labels == 0 || o.num_triggers < o.num_labels) {
    throw std::invalid_argument("make_planted_spec: need num_triggers >= num_labels >= 1");
  }
  SyntheticSpec spec;
  spec.num_labels = o.num_labels;
  spec.label_triggers.assign(o.num_labels, {});
  Rng rng = make_rng(o.seed, "synthetic_spec");
  std::set<NGram> used;
  std::size_t fresh = 0;
  auto make_ngram = [&]() {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      NGram g;
      for (std::size_t w = 0; w < o.ngram_length; ++w) {
        std::size_t id = o.word_pool == 0 ? fresh++ : std::uniform_int_distribution<std::size_t>(0, o.word_pool - 1)(rng);
        g.push_back(synthetic_word("kw", id));
      }
      if (used.insert(g).second) return g;
    }
    throw std::invalid_argument("make_planted_spec: word pool too small for distinct n-grams");
  };
  for (std::size_t t = 0; t < o.num_triggers; ++t) spec.label_triggers[t % o.num_labels].push_back(make_ngram());
  for (std::size_t g = 0; g < o.num_generic; ++g) {
    GenericTrigger gt;
    NGram ng;
    for (std::size_t w = 0; w < o.ngram_length; ++w) ng.push_back(synthetic_word("gn", g * o.ngram_length + w));
    gt.ngram = ng;
    std::vector<std::size_t> all(o.num_labels);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(o.labels_per_generic, o.num_labels));
    std::sort(all.begin(), all.end());
    gt.labels = all;
    spec.generic_triggers.push_back(gt);
  }
  return spec;
}

// Throws std::invalid_argument when the spec is inconsistent. A nonzero
// `filter_width` additionally checks that every trigger fits in one window.
inline void validate(const SyntheticSpec& spec, std::size_t filter_width = 0) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("SyntheticSpec: " + m); };
  if (spec.num_labels == 0) fail("num_labels must be >= 1");
  if (spec.label_triggers.size() != spec.num_labels) fail("label_triggers must have num_labels entries");
  std::set<NGram> seen;
  std::set<std::string> trigger_words;
  auto check = [&](const NGram& g) {
    if (g.empty()) fail("empty trigger");
    if (!seen.insert(g).second) fail("duplicate trigger n-gram");
    for (const auto& w : g) {
      if (tokenize(w) != std::vector<std::string>{w}) fail("trigger word '" + w + "' does not survive tokenization");
      trigger_words.insert(w);
    }
  };
  for (std::size_t l = 0; l < spec.num_labels; ++l) {
    if (spec.label_triggers[l].empty()) fail("label " + std::to_string(l) + " has no trigger");
    for (const auto& g : spec.label_triggers[l]) check(g);
  }
  for (const auto& g : spec.generic_triggers) {
    check(g.ngram);
    if (g.labels.empty()) fail("generic trigger with no labels");
    for (auto l : g.labels)
      if (l >= spec.num_labels) fail("generic trigger label out of range");
  }
  for (std::size_t i = 0; i < spec.filler_vocab_size; ++i) {
    if (trigger_words.count(filler_token(i))) fail("filler token collides with a trigger word");
  }
  if (filter_width != 0 && spec.max_ngram_length() > filter_width) fail("trigger longer than filter width");
  if (spec.filler_vocab_size == 0) fail("filler_vocab_size must be >= 1");
  if (spec.min_length > spec.max_length) fail("min_length > max_length");
  if (!(spec.label_prior > 0.0 && spec.label_prior <= 1.0)) fail("label_prior must be in (0,1]");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0)) fail("noise_rate must be in [0,1)");
  if (!(spec.generic_rate >= 0.0 && spec.generic_rate <= 1.0)) fail("generic_rate must be in [0,1]");
  if (spec.min_labels_per_doc > spec.num_labels) fail("min_labels_per_doc > num_labels");
}

inline LabelSpace synthetic_label_space(const SyntheticSpec& spec) {
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < spec.num_labels; ++i) codes.push_back(synthetic_label_code(i));
  return LabelSpace(std::move(codes));
}

// Generates `n_docs` records. Each positive label plants one of its
// non-generic triggers; with probability `noise_rate` that label is then
// withheld, leaving the trigger without its label. Filler words are drawn
// uniformly and independently of the labels.
inline std::vector<RawRecord> generate_synthetic(const SyntheticSpec& spec, std::size_t n_docs,
                                                 std::uint64_t seed) {
  validate(spec);
  Rng rng = make_rng(seed, "synthetic");
  std::bernoulli_distribution label_draw(spec.label_prior);
  std::bernoulli_distribution noise_draw(spec.noise_rate);
  std::bernoulli_distribution generic_draw(spec.generic_rate);
  std::uniform_int_distribution<std::size_t> len_draw(spec.min_length, spec.max_length);
  std::uniform_int_distribution<std::size_t> filler_draw(0, spec.filler_vocab_size - 1);
  const int width = static_cast<int>(std::to_string(n_docs > 0 ? n_docs - 1 : 0).size());

  std::vector<RawRecord> records;
  records.reserve(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<std::size_t> positives;
    do {
      positives.clear();
      for (std::size_t l = 0; l < spec.num_labels; ++l)
        if (label_draw(rng)) positives.push_back(l);
    } while (positives.size() < spec.min_labels_per_doc);

    std::vector<const NGram*> units;
    std::set<std::string> codes;
    std::set<std::size_t> generic_used;
    for (auto l : positives) {
      const auto& triggers = spec.label_triggers[l];
      units.push_back(&triggers[std::uniform_int_distribution<std::size_t>(0, triggers.size() - 1)(rng)]);
      if (!noise_draw(rng)) codes.insert(synthetic_label_code(l));
      for (std::size_t g = 0; g < spec.generic_triggers.size(); ++g) {
        const auto& gl = spec.generic_triggers[g].labels;
        if (std::find(gl.begin(), gl.end(), l) != gl.end() && !generic_used.count(g) && generic_draw(rng)) {
          generic_used.insert(g);
          units.push_back(&spec.generic_triggers[g].ngram);
        }
      }
    }
    std::size_t planted = 0;
    for (auto* u : units) planted += u->size();
    std::size_t target = len_draw(rng);
    std::size_t n_filler = target > planted ? target - planted : 0;

    // Interleave planted n-grams (as atomic units) with filler words.
    std::vector<std::size_t> order(units.size() + n_filler);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::string text;
    for (auto idx : order) {
      if (idx < units.size()) {
        for (const auto& w : *units[idx]) text += (text.empty() ? "" : " ") + w;
      } else {
        text += (text.empty() ? "" : " ") + filler_token(filler_draw(rng));
      }
    }
    std::ostringstream id;
    id << "syn" << std::setw(width) << std::setfill('0') << d;
    records.push_back(RawRecord{id.str(), std::move(codes), std::move(text)});
  }
  return records;
}

// Positions at which `ngram` occurs in `tokens`.
inline std::vector<std::size_t> find_ngram(const std::vector<std::string>& tokens, const NGram& ngram) {
  std::vector<std::size_t> hits;
  if (ngram.empty() || tokens.size() < ngram.size()) return hits;
  for (std::size_t i = 0; i + ngram.size() <= tokens.size(); ++i) {
    if (std::equal(ngram.begin(), ngram.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) hits.push_back(i);
  }
  return hits;
}

}  // namespace swam

#endif  // SWAM_CORPUS_HPP
