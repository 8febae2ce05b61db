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

// Shallow-and-wide attention CNN: embedding lookup, one wide 1-D
// convolution, per-label attention (or max-pooling) and per-label sigmoid
// outputs.
//
// Shapes used throughout (N = document length):
//   X         N x d_e          embedded document
//   conv_w    d_c x (k*d_e)    column j*d_e + e holds W_c[j][e][.]
//   H         d_c x N          tanh activations
//   attention L x d_c          row l is u_l        (per-label variant only)
//   output_w  L x d_c          row l is beta_l
//   A         L x N            row l is alpha_l

#ifndef SWAM_MODEL_HPP
#define SWAM_MODEL_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "swam/common.hpp"
#include "swam/corpus.hpp"
#include "swam/embedding.hpp"

namespace swam {

enum class AttentionVariant { kPerLabel, kMaxPool };

inline std::string to_string(AttentionVariant v) { return v == AttentionVariant::kPerLabel ? "per_label" : "max_pool"; }

inline AttentionVariant parse_variant(const std::string& s) {
  if (s == "per_label") return AttentionVariant::kPerLabel;
  if (s == "max_pool") return AttentionVariant::kMaxPool;
  throw std::invalid_argument("unknown attention variant: " + s);
}

struct ModelConfig {
  std::size_t embed_dim = 100;
  std::size_t num_filters = 500;
  std::size_t filter_width = 4;
  std::size_t num_labels = 50;
  std::size_t max_len = 2500;
  AttentionVariant variant = AttentionVariant::kPerLabel;
  double dropout = 0.2;

  void validate() const {
    if (embed_dim < 1) throw std::invalid_argument("ModelConfig: embed_dim must be >= 1");
    if (num_filters < 1) throw std::invalid_argument("ModelConfig: num_filters must be >= 1");
    if (filter_width < 1 || filter_width > max_len) throw std::invalid_argument("ModelConfig: need 1 <= k <= max_len");
    if (num_labels < 1) throw std::invalid_argument("ModelConfig: num_labels must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("ModelConfig: dropout must be in [0,1)");
  }

  std::size_t pad_left() const { return (filter_width - 1) / 2; }
  std::size_t pad_right() const { return filter_width - 1 - pad_left(); }

  bool operator==(const ModelConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"embed_dim", c.embed_dim},  {"num_filters", c.num_filters}, {"filter_width", c.filter_width},
       {"num_labels", c.num_labels}, {"max_len", c.max_len},         {"variant", to_string(c.variant)},
       {"dropout", c.dropout},       {"nonlinearity", "tanh"}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.embed_dim = j.value("embed_dim", d.embed_dim);
  c.num_filters = j.value("num_filters", d.num_filters);
  c.filter_width = j.value("filter_width", d.filter_width);
  c.num_labels = j.value("num_labels", d.num_labels);
  c.max_len = j.value("max_len", d.max_len);
  c.variant = parse_variant(j.value("variant", to_string(d.variant)));
  c.dropout = j.value("dropout", d.dropout);
}

// One tensor per trainable parameter. Shared by parameters, gradients and
// optimizer moments so they can be walked in lockstep.
struct ParamTensors {
  Eigen::MatrixXd embedding;  // |V| x d_e
  Eigen::MatrixXd conv_w;     // d_c x (k*d_e)
  Eigen::VectorXd conv_b;     // d_c
  Eigen::MatrixXd attention;  // L x d_c, empty for max_pool
  Eigen::MatrixXd output_w;   // L x d_c
  Eigen::VectorXd output_b;   // L

  static constexpr std::array<const char*, 6> kNames = {"embedding", "W_c", "b_c", "U", "B", "b"};

  std::array<std::span<double>, 6> blocks() {
    return {std::span<double>(embedding.data(), static_cast<std::size_t>(embedding.size())),
            std::span<double>(conv_w.data(), static_cast<std::size_t>(conv_w.size())),
            std::span<double>(conv_b.data(), static_cast<std::size_t>(conv_b.size())),
            std::span<double>(attention.data(), static_cast<std::size_t>(attention.size())),
            std::span<double>(output_w.data(), static_cast<std::size_t>(output_w.size())),
            std::span<double>(output_b.data(), static_cast<std::size_t>(output_b.size()))};
  }
  std::array<std::span<const double>, 6> blocks() const {
    auto b = const_cast<ParamTensors*>(this)->blocks();
    return {b[0], b[1], b[2], b[3], b[4], b[5]};
  }

  ParamTensors zeros_like() const {
    ParamTensors z;
    z.embedding = Eigen::MatrixXd::Zero(embedding.rows(), embedding.cols());
    z.conv_w = Eigen::MatrixXd::Zero(conv_w.rows(), conv_w.cols());
    z.conv_b = Eigen::VectorXd::Zero(conv_b.size());
    z.attention = Eigen::MatrixXd::Zero(attention.rows(), attention.cols());
    z.output_w = Eigen::MatrixXd::Zero(output_w.rows(), output_w.cols());
    z.output_b = Eigen::VectorXd::Zero(output_b.size());
    return z;
  }

  bool all_finite() const {
    return embedding.allFinite() && conv_w.allFinite() && conv_b.allFinite() && attention.allFinite() &&
           output_w.allFinite() && output_b.allFinite();
  }

  bool operator==(const ParamTensors& o) const {
    auto a = blocks();
    auto b = o.blocks();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != b[i].size() || !std::equal(a[i].begin(), a[i].end(), b[i].begin())) return false;
    }
    return true;
  }
};

struct SwamParams : ParamTensors {};
struct GradientSet : ParamTensors {};

inline GradientSet zero_gradients(const SwamParams& p) { return GradientSet{p.zeros_like()}; }

struct InitInfo {
  std::string scheme = "xavier_uniform";
  std::uint64_t seed = 0;
  std::string embedding_source = "random";
};

struct SwamModel {
  ModelConfig config;
  SwamParams params;
  InitInfo init;
};

inline void check_shapes(const SwamModel& m) {
  const auto& c = m.config;
  const auto& p = m.params;
  const auto dc = static_cast<Eigen::Index>(c.num_filters), de = static_cast<Eigen::Index>(c.embed_dim);
  const auto L = static_cast<Eigen::Index>(c.num_labels), k = static_cast<Eigen::Index>(c.filter_width);
  bool ok = p.embedding.cols() == de && p.embedding.rows() >= 2 && p.conv_w.rows() == dc && p.conv_w.cols() == k * de &&
            p.conv_b.size() == dc && p.output_w.rows() == L && p.output_w.cols() == dc && p.output_b.size() == L;
  if (c.variant == AttentionVariant::kPerLabel) {
    ok = ok && p.attention.rows() == L && p.attention.cols() == dc;
  } else {
    ok = ok && p.attention.size() == 0;
  }
  if (!ok) throw Error("model parameters do not match ModelConfig shapes");
}

// Xavier/Glorot uniform for W_c, U and B; zero biases. The embedding table is
// copied from `pretrained` when given, otherwise uniform(-0.05, 0.05).
inline SwamModel init_model(const ModelConfig& config, std::size_t vocab_size, std::uint64_t seed,
                            const EmbeddingTable* pretrained = nullptr) {
  config.validate();
  if (vocab_size < 2) throw std::invalid_argument("init_model: vocabulary must contain PAD and UNK");
  SwamModel m;
  m.config = config;
  m.init.seed = seed;
  Rng rng = make_rng(seed, "init");
  const auto dc = static_cast<Eigen::Index>(config.num_filters), de = static_cast<Eigen::Index>(config.embed_dim);
  const auto L = static_cast<Eigen::Index>(config.num_labels), k = static_cast<Eigen::Index>(config.filter_width);
  auto xavier = [&](Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = bound * u(rng);
    return w;
  };
  if (pretrained) {
    if (pretrained->rows() != vocab_size || pretrained->dim() != config.embed_dim) {
      throw Error("pretrained embedding shape does not match vocabulary/embed_dim");
    }
    m.params.embedding = pretrained->vectors;
    m.init.embedding_source = "pretrained";
  } else {
    Rng erng = make_rng(seed, "init_embedding");
    m.params.embedding = uniform_embeddings(vocab_size, config.embed_dim, 0.05, erng).vectors;
  }
  m.params.embedding.row(kPadId).setZero();
  m.params.conv_w = xavier(dc, k * de, static_cast<double>(k * de), static_cast<double>(dc));
  m.params.conv_b = Eigen::VectorXd::Zero(dc);
  if (config.variant == AttentionVariant::kPerLabel) {
    m.params.attention = xavier(L, dc, static_cast<double>(dc), static_cast<double>(L));
  } else {
    m.params.attention.resize(0, 0);
  }
  m.params.output_w = xavier(L, dc, static_cast<double>(dc), static_cast<double>(L));
  m.params.output_b = Eigen::VectorXd::Zero(L);
  return m;
}

// ---------------------------------------------------------------------------
// Layer operations

// Stable logistic, clamped to the open interval (0, 1) for any finite z.
inline double sigmoid(double z) {
  constexpr double kHi = 1.0 - 0x1p-53;
  constexpr double kLo = std::numeric_limits<double>::denorm_min();
  if (z >= 0) return std::min(kHi, 1.0 / (1.0 + std::exp(-z)));
  const double e = std::exp(z);
  return std::max(kLo, e / (1.0 + e));
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline Eigen::MatrixXd embed(std::span<const TokenId> token_ids, const Eigen::MatrixXd& table) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(token_ids.size()), table.cols());
  for (std::size_t n = 0; n < token_ids.size(); ++n) x.row(static_cast<Eigen::Index>(n)) = table.row(token_ids[n]);
  return x;
}

// Rows of the zero-padded input seen by each output position: row n holds
// x_pad[n], ..., x_pad[n+k-1] concatenated.
inline Eigen::MatrixXd conv_patches(const Eigen::MatrixXd& x, std::size_t k) {
  const Eigen::Index n = x.rows(), de = x.cols(), left = static_cast<Eigen::Index>((k - 1) / 2);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(k) * de);
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
      Eigen::Index src = pos + j - left;
      if (src >= 0 && src < n) p.block(pos, j * de, 1, de) = x.row(src);
    }
  }
  return p;
}

// H[:, n] = tanh(sum_j W_c[j]^T x_pad[n+j] + b_c). Output has N columns.
inline Eigen::MatrixXd convolve_patches(const Eigen::MatrixXd& patches, const Eigen::MatrixXd& conv_w,
                                        const Eigen::VectorXd& conv_b) {
  Eigen::MatrixXd z = conv_w * patches.transpose();
  z.colwise() += conv_b;
  return z.array().tanh().matrix();
}

inline Eigen::MatrixXd convolve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& conv_w, const Eigen::VectorXd& conv_b,
                                std::size_t k) {
  return convolve_patches(conv_patches(x, k), conv_w, conv_b);
}

inline void softmax_rows(Eigen::MatrixXd& s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - mx).exp().matrix();
    s.row(r) /= s.row(r).sum();
  }
}

struct PerLabelAttention {
  Eigen::MatrixXd alpha;  // L x N
  Eigen::MatrixXd v;      // L x d_c
};

inline PerLabelAttention attend_per_label(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u) {
  PerLabelAttention a;
  a.alpha = u * h;
  softmax_rows(a.alpha);
  a.v = a.alpha * h.transpose();
  return a;
}

struct MaxPool {
  Eigen::VectorXd v;                  // d_c
  std::vector<Eigen::Index> argmax;   // column of each filter's maximum, smallest on ties
};

inline MaxPool attend_max_pool(const Eigen::MatrixXd& h) {
  MaxPool m;
  m.v.resize(h.rows());
  m.argmax.resize(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index n = 1; n < h.cols(); ++n)
      if (h(j, n) > h(j, best)) best = n;
    m.v(j) = h(j, best);
    m.argmax[static_cast<std::size_t>(j)] = best;
  }
  return m;
}

// Logits beta_l . v_l + b_l for per-label document vectors (rows of v).
inline Eigen::VectorXd classify_logits(const Eigen::MatrixXd& v, const Eigen::MatrixXd& output_w,
                                       const Eigen::VectorXd& output_b) {
  return output_w.cwiseProduct(v).rowwise().sum() + output_b;
}

// Logits when every label shares one document vector (max-pool variant).
inline Eigen::VectorXd classify_logits(const Eigen::VectorXd& v, const Eigen::MatrixXd& output_w,
                                       const Eigen::VectorXd& output_b) {
  return output_w * v + output_b;
}

inline Eigen::VectorXd probabilities(const Eigen::VectorXd& logits) { return logits.unaryExpr(&sigmoid); }

// Binary cross-entropy summed over labels, in the fused logit form
// softplus(z) - y z.
inline double bce_loss(const Eigen::VectorXd& logits, std::span<const std::uint8_t> y) {
  double loss = 0.0;
  for (Eigen::Index l = 0; l < logits.size(); ++l) {
    loss += softplus(logits(l)) - (y[static_cast<std::size_t>(l)] ? logits(l) : 0.0);
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Full forward pass

enum class Mode { kTrain, kEval };

struct Prediction {
  Eigen::VectorXd logits;
  Eigen::VectorXd y_hat;
  Eigen::MatrixXd doc_vectors;  // L x d_c (per_label) or 1 x d_c (max_pool)
  Eigen::MatrixXd attention;    // L x N, per_label only
  std::vector<Eigen::Index> argmax;  // max_pool only
};

// Intermediates kept for backprop.
struct ForwardCache {
  std::vector<TokenId> token_ids;
  Eigen::MatrixXd dropout_mask;  // N x d_e scale factors; empty when no dropout was applied
  Eigen::MatrixXd patches;       // N x (k*d_e)
  Eigen::MatrixXd h;             // d_c x N
};

struct ForwardPass {
  Prediction prediction;
  ForwardCache cache;
};

// Train mode applies inverted dropout with probability q to X and needs
// `dropout_rng`; eval mode is deterministic.
inline ForwardPass forward(std::span<const TokenId> token_ids, const SwamModel& model, Mode mode,
                           Rng* dropout_rng = nullptr) {
  const auto& c = model.config;
  const auto& p = model.params;
  if (token_ids.empty()) throw std::invalid_argument("forward: empty document");
  ForwardPass out;
  out.cache.token_ids.assign(token_ids.begin(), token_ids.end());
  Eigen::MatrixXd x = embed(token_ids, p.embedding);
  if (mode == Mode::kTrain && c.dropout > 0.0) {
    if (!dropout_rng) throw std::invalid_argument("forward: train mode with dropout needs an RNG");
    std::bernoulli_distribution keep(1.0 - c.dropout);
    const double scale = 1.0 / (1.0 - c.dropout);
    out.cache.dropout_mask.resize(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index col = 0; col < x.cols(); ++col) out.cache.dropout_mask(r, col) = keep(*dropout_rng) ? scale : 0.0;
    x.array() *= out.cache.dropout_mask.array();
  }
  out.cache.patches = conv_patches(x, c.filter_width);
  out.cache.h = convolve_patches(out.cache.patches, p.conv_w, p.conv_b);
  auto& pred = out.prediction;
  if (c.variant == AttentionVariant::kPerLabel) {
    auto att = attend_per_label(out.cache.h, p.attention);
    pred.logits = classify_logits(att.v, p.output_w, p.output_b);
    pred.doc_vectors = std::move(att.v);
    pred.attention = std::move(att.alpha);
  } else {
    auto mp = attend_max_pool(out.cache.h);
    pred.logits = classify_logits(mp.v, p.output_w, p.output_b);
    pred.doc_vectors = mp.v.transpose();
    pred.argmax = std::move(mp.argmax);
  }
  pred.y_hat = probabilities(pred.logits);
  return out;
}

inline ForwardPass forward(const Document& doc, const SwamModel& model, Mode mode, Rng* dropout_rng = nullptr) {
  return forward(std::span<const TokenId>(doc.token_ids), model, mode, dropout_rng);
}

// ---------------------------------------------------------------------------
// Checkpoints
//
//   SWAM-CHECKPOINT 1\n
//   <one-line JSON header>\n
//   blocks of little-endian float64 in order: embedding (|V| rows x d_e),
//   W_c (k x d_e x d_c, c fastest), b_c, U (L x d_c, row-major; absent for
//   max_pool), B (L x d_c, row-major), b.

inline constexpr std::string_view kCheckpointMagic = "SWAM-CHECKPOINT 1";

namespace detail {

inline void put_f64(std::string& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double get_f64(const std::string& buf, std::size_t& off) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
  off += 8;
  return std::bit_cast<double>(bits);
}

}  // namespace detail

struct CheckpointMeta {
  std::vector<std::string> label_codes;
  std::uint64_t seed = 0;
  nlohmann::json extra = nlohmann::json::object();
};

inline std::string serialize_checkpoint(const SwamModel& m, const CheckpointMeta& meta) {
  check_shapes(m);
  const auto& c = m.config;
  const auto& p = m.params;
  const std::size_t V = static_cast<std::size_t>(p.embedding.rows());
  nlohmann::json header;
  header["format_version"] = 1;
  header["config"] = c;
  header["vocab_size"] = V;
  header["init"] = {{"scheme", m.init.scheme}, {"seed", m.init.seed}, {"embedding_source", m.init.embedding_source}};
  header["seed"] = meta.seed;
  header["label_codes"] = meta.label_codes;
  header["label_space_hash"] = LabelSpace(meta.label_codes).hash();
  header["block_order"] = {"embedding", "W_c", "b_c", "U", "B", "b"};
  header["extra"] = meta.extra;

  std::string out(kCheckpointMagic);
  out += '\n';
  out += header.dump();
  out += '\n';
  const auto de = c.embed_dim, dc = c.num_filters, k = c.filter_width, L = c.num_labels;
  for (std::size_t r = 0; r < V; ++r)
    for (std::size_t e = 0; e < de; ++e) detail::put_f64(out, p.embedding(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t e = 0; e < de; ++e)
      for (std::size_t f = 0; f < dc; ++f)
        detail::put_f64(out, p.conv_w(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(j * de + e)));
  for (std::size_t f = 0; f < dc; ++f) detail::put_f64(out, p.conv_b(static_cast<Eigen::Index>(f)));
  if (c.variant == AttentionVariant::kPerLabel) {
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t f = 0; f < dc; ++f) detail::put_f64(out, p.attention(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(f)));
  }
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t f = 0; f < dc; ++f) detail::put_f64(out, p.output_w(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(f)));
  for (std::size_t l = 0; l < L; ++l) detail::put_f64(out, p.output_b(static_cast<Eigen::Index>(l)));
  return out;
}

struct LoadedCheckpoint {
  SwamModel model;
  CheckpointMeta meta;
};

inline LoadedCheckpoint deserialize_checkpoint(const std::string& buf, const std::string& origin = "<checkpoint>") {
  auto nl1 = buf.find('\n');
  if (nl1 == std::string::npos || buf.compare(0, nl1, kCheckpointMagic) != 0) {
    throw FormatError(origin, 1, "not a SWAM checkpoint (bad magic)");
  }
  auto nl2 = buf.find('\n', nl1 + 1);
  if (nl2 == std::string::npos) throw FormatError(origin, 2, "truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(buf.substr(nl1 + 1, nl2 - nl1 - 1));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin, 2, std::string("bad header: ") + e.what());
  }
  LoadedCheckpoint lc;
  auto& m = lc.model;
  std::size_t V = 0;
  try {
    m.config = header.at("config").get<ModelConfig>();
    m.init.scheme = header.at("init").at("scheme");
    m.init.seed = header.at("init").at("seed");
    m.init.embedding_source = header.at("init").at("embedding_source");
    lc.meta.seed = header.at("seed");
    lc.meta.label_codes = header.at("label_codes").get<std::vector<std::string>>();
    lc.meta.extra = header.value("extra", nlohmann::json::object());
    V = header.at("vocab_size");
    if (header.at("block_order") != nlohmann::json{"embedding", "W_c", "b_c", "U", "B", "b"}) {
      throw FormatError(origin, 2, "unexpected block order");
    }
    if (LabelSpace(lc.meta.label_codes).hash() != header.at("label_space_hash")) {
      throw FormatError(origin, 2, "label space hash mismatch");
    }
    m.config.validate();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin, 2, std::string("bad header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(origin, 2, std::string("bad header: ") + e.what());
  }
  const auto& c = m.config;
  const auto de = c.embed_dim, dc = c.num_filters, k = c.filter_width, L = c.num_labels;
  std::size_t count = V * de + k * de * dc + dc + L * dc + L;
  if (c.variant == AttentionVariant::kPerLabel) count += L * dc;
  std::size_t off = nl2 + 1;
  if (buf.size() - off != count * 8) {
    throw FormatError(origin, 3, "parameter payload has " + std::to_string(buf.size() - off) + " bytes, expected " +
                                     std::to_string(count * 8));
  }
  auto& p = m.params;
  p.embedding.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(de));
  for (std::size_t r = 0; r < V; ++r)
    for (std::size_t e = 0; e < de; ++e) p.embedding(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) = detail::get_f64(buf, off);
  p.conv_w.resize(static_cast<Eigen::Index>(dc), static_cast<Eigen::Index>(k * de));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t e = 0; e < de; ++e)
      for (std::size_t f = 0; f < dc; ++f)
        p.conv_w(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(j * de + e)) = detail::get_f64(buf, off);
  p.conv_b.resize(static_cast<Eigen::Index>(dc));
  for (std::size_t f = 0; f < dc; ++f) p.conv_b(static_cast<Eigen::Index>(f)) = detail::get_f64(buf, off);
  if (c.variant == AttentionVariant::kPerLabel) {
    p.attention.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(dc));
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t f = 0; f < dc; ++f) p.attention(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(f)) = detail::get_f64(buf, off);
  } else {
    p.attention.resize(0, 0);
  }
  p.output_w.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(dc));
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t f = 0; f < dc; ++f) p.output_w(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(f)) = detail::get_f64(buf, off);
  p.output_b.resize(static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l) p.output_b(static_cast<Eigen::Index>(l)) = detail::get_f64(buf, off);
  check_shapes(m);
  if (!p.all_finite()) throw FormatError(origin, 3, "non-finite parameter in checkpoint");
  return lc;
}

inline void save_checkpoint(const SwamModel& m, const CheckpointMeta& meta, const std::string& path) {
  auto out = open_for_write(path, true);
  const auto buf = serialize_checkpoint(m, meta);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

inline LoadedCheckpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path), path); }

}  // namespace swam

#endif  // SWAM_MODEL_HPP
