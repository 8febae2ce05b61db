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

#ifndef SWAM_TRAIN_HPP
#define SWAM_TRAIN_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "swam/metrics.hpp"
#include "swam/model.hpp"

namespace swam {

// ---------------------------------------------------------------------------
// Backpropagation

// Adds scale * d(loss)/d(param) for one document to `grads`, where loss is
// the label-summed BCE of `pass`. Use scale = 1/batch for a batch mean.
inline void backward(const ForwardPass& pass, std::span<const std::uint8_t> y, const SwamModel& model,
                     GradientSet& grads, double scale = 1.0, bool embedding_grads = true) {
  const auto& c = model.config;
  const auto& p = model.params;
  const auto& pred = pass.prediction;
  const auto& h = pass.cache.h;
  const auto L = static_cast<Eigen::Index>(c.num_labels);
  if (y.size() != c.num_labels) throw std::invalid_argument("backward: label vector has wrong size");

  Eigen::VectorXd dz(L);
  for (Eigen::Index l = 0; l < L; ++l) dz(l) = (pred.y_hat(l) - (y[static_cast<std::size_t>(l)] ? 1.0 : 0.0)) * scale;
  grads.output_b += dz;

  Eigen::MatrixXd dh;
  if (c.variant == AttentionVariant::kPerLabel) {
    const auto& a = pred.attention;   // L x N
    const auto& v = pred.doc_vectors;  // L x d_c
    grads.output_w.noalias() += dz.asDiagonal() * v;
    Eigen::MatrixXd dv = dz.asDiagonal() * p.output_w;  // L x d_c
    Eigen::MatrixXd da = dv * h;                        // L x N
    dh.noalias() = dv.transpose() * a;                  // d_c x N
    Eigen::VectorXd inner = da.cwiseProduct(a).rowwise().sum();
    Eigen::MatrixXd ds = a.cwiseProduct(da.colwise() - inner);  // softmax Jacobian
    grads.attention.noalias() += ds * h.transpose();
    dh.noalias() += p.attention.transpose() * ds;
  } else {
    Eigen::VectorXd v = pred.doc_vectors.row(0).transpose();
    grads.output_w.noalias() += dz * v.transpose();
    Eigen::VectorXd dv = p.output_w.transpose() * dz;
    dh = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    for (Eigen::Index j = 0; j < h.rows(); ++j) dh(j, pred.argmax[static_cast<std::size_t>(j)]) = dv(j);
  }

  Eigen::MatrixXd dpre = dh.cwiseProduct((1.0 - h.array().square()).matrix());  // tanh'
  grads.conv_w.noalias() += dpre * pass.cache.patches;
  grads.conv_b += dpre.rowwise().sum();
  if (!embedding_grads) return;

  Eigen::MatrixXd dpatch = dpre.transpose() * p.conv_w;  // N x (k*d_e)
  const Eigen::Index n = h.cols(), de = static_cast<Eigen::Index>(c.embed_dim);
  const Eigen::Index k = static_cast<Eigen::Index>(c.filter_width), left = static_cast<Eigen::Index>(c.pad_left());
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n, de);
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::Index src = pos + j - left;
      if (src >= 0 && src < n) dx.row(src) += dpatch.block(pos, j * de, 1, de);
    }
  }
  if (pass.cache.dropout_mask.size() > 0) dx.array() *= pass.cache.dropout_mask.array();
  const auto& ids = pass.cache.token_ids;
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    if (ids[static_cast<std::size_t>(pos)] != kPadId) grads.embedding.row(ids[static_cast<std::size_t>(pos)]) += dx.row(pos);
  }
}

inline double global_norm(const GradientSet& g) {
  double sq = 0.0;
  for (auto b : g.blocks())
    for (double x : b) sq += x * x;
  return std::sqrt(sq);
}

// Rescales `g` to `max_norm` when its global L2 norm exceeds it. Returns the
// norm before clipping.
inline double clip_global_norm(GradientSet& g, double max_norm) {
  const double norm = global_norm(g);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto b : g.blocks())
      for (double& x : b) x *= s;
  }
  return norm;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::size_t t = 0;
  ParamTensors m;
  ParamTensors v;

  static AdamState zeros_for(const SwamParams& p) { return {0, p.zeros_like(), p.zeros_like()}; }
};

class NonFiniteGradientError : public Error {
 public:
  NonFiniteGradientError() : Error("non-finite gradient") {}
};

inline void adam_step(SwamParams& params, const GradientSet& grads, AdamState& state, const AdamConfig& cfg,
                      bool freeze_embeddings = false) {
  if (!grads.all_finite()) throw NonFiniteGradientError();
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  auto pb = params.blocks();
  auto gb = grads.blocks();
  auto mb = state.m.blocks();
  auto vb = state.v.blocks();
  for (std::size_t b = freeze_embeddings ? 1 : 0; b < pb.size(); ++b) {
    for (std::size_t i = 0; i < pb[b].size(); ++i) {
      const double g = gb[b][i];
      mb[b][i] = cfg.beta1 * mb[b][i] + (1.0 - cfg.beta1) * g;
      vb[b][i] = cfg.beta2 * vb[b][i] + (1.0 - cfg.beta2) * g * g;
      pb[b][i] -= cfg.learning_rate * (mb[b][i] / c1) / (std::sqrt(vb[b][i] / c2) + cfg.epsilon);
    }
  }
}

// ---------------------------------------------------------------------------
// Training loop with early stopping on validation macro-F1

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 1;
  // Seed of the data-order substream; defaults to `seed`.
  std::optional<std::uint64_t> shuffle_seed;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  bool freeze_embeddings = false;
  double gradient_clip = 10.0;
  double threshold = kDefaultThreshold;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"patience", c.patience},
       {"max_epochs", c.max_epochs},       {"seed", c.seed},             {"beta1", c.beta1},
       {"beta2", c.beta2},                 {"epsilon", c.epsilon},       {"freeze_embeddings", c.freeze_embeddings},
       {"gradient_clip", c.gradient_clip}, {"threshold", c.threshold}};
  j["shuffle_seed"] = c.shuffle_seed ? nlohmann::json(*c.shuffle_seed) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.patience = j.value("patience", d.patience);
  c.max_epochs = j.value("max_epochs", d.max_epochs);
  c.seed = j.value("seed", d.seed);
  c.beta1 = j.value("beta1", d.beta1);
  c.beta2 = j.value("beta2", d.beta2);
  c.epsilon = j.value("epsilon", d.epsilon);
  c.freeze_embeddings = j.value("freeze_embeddings", d.freeze_embeddings);
  c.gradient_clip = j.value("gradient_clip", d.gradient_clip);
  c.threshold = j.value("threshold", d.threshold);
  if (j.contains("shuffle_seed") && !j["shuffle_seed"].is_null()) c.shuffle_seed = j["shuffle_seed"].get<std::uint64_t>();
}

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double val_macro_f1 = 0, val_micro_f1 = 0;
  std::optional<double> val_macro_auc, val_micro_auc;
  double val_p5 = 0;
  double wall_time_s = 0;
  std::size_t clipped_steps = 0;
};

// Wall time is left out unless requested so that history files replay bit-identically.
inline nlohmann::json to_json(const EpochRecord& r, bool include_timing = false) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j = {{"epoch", r.epoch},
                      {"train_loss", r.train_loss},
                      {"val_macro_f1", r.val_macro_f1},
                      {"val_micro_f1", r.val_micro_f1},
                      {"val_macro_auc", opt(r.val_macro_auc)},
                      {"val_micro_auc", opt(r.val_micro_auc)},
                      {"val_p_at_5", r.val_p5},
                      {"clipped_steps", r.clipped_steps}};
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline void write_history(const std::vector<EpochRecord>& h, std::ostream& os, bool include_timing = false) {
  for (const auto& r : h) os << to_json(r, include_timing).dump() << '\n';
}

struct TrainResult {
  SwamModel best;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_macro_f1 = -1.0;
  bool early_stopped = false;
};

struct TrainHooks {
  // Replaces the validation macro-F1 used for early stopping.
  std::function<double(const SwamModel&, std::size_t epoch)> validator;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Mean batch loss of `docs` under eval-mode forward.
inline double mean_loss(const SwamModel& model, const std::vector<Document>& docs) {
  double total = 0.0;
  for (const auto& d : docs) total += bce_loss(forward(d, model, Mode::kEval).prediction.logits, d.labels);
  return docs.empty() ? 0.0 : total / static_cast<double>(docs.size());
}

// One optimizer step on `batch`; returns the batch-mean training loss.
inline double train_step(SwamModel& model, std::span<const Document* const> batch, AdamState& state,
                         const TrainConfig& cfg, Rng& dropout_rng, GradientSet& grads, bool* clipped = nullptr) {
  for (auto b : grads.blocks()) std::fill(b.begin(), b.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const Document* d : batch) {
    auto pass = forward(*d, model, Mode::kTrain, &dropout_rng);
    loss += bce_loss(pass.prediction.logits, d->labels);
    backward(pass, d->labels, model, grads, scale, !cfg.freeze_embeddings);
  }
  const double norm = clip_global_norm(grads, cfg.gradient_clip);
  if (clipped) *clipped = cfg.gradient_clip > 0.0 && norm > cfg.gradient_clip;
  adam_step(model.params, grads, state, cfg.adam(), cfg.freeze_embeddings);
  return loss * scale;
}

inline TrainResult train(SwamModel model, const std::vector<Document>& train_docs,
                         const std::vector<Document>& val_docs, const std::vector<std::string>& codes,
                         const TrainConfig& cfg, const TrainHooks& hooks = {}) {
  cfg.validate();
  check_shapes(model);
  if (train_docs.empty()) throw EmptyCorpusError();
  if (codes.size() != model.config.num_labels) throw std::invalid_argument("train: label space size mismatch");
  for (const auto* set : {&train_docs, &val_docs})
    for (const auto& d : *set)
      if (d.labels.size() != model.config.num_labels) throw std::invalid_argument("train: inconsistent label vectors");

  Rng order_rng = make_rng(cfg.shuffle_seed.value_or(cfg.seed), "shuffle");
  Rng dropout_rng = make_rng(cfg.seed, "dropout");
  AdamState state = AdamState::zeros_for(model.params);
  GradientSet grads = zero_gradients(model.params);
  std::vector<const Document*> order;
  for (const auto& d : train_docs) order.push_back(&d);

  TrainResult result;
  result.best = model;
  std::size_t since_best = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      bool clipped = false;
      loss_sum += train_step(model, std::span<const Document* const>(order.data() + start, len), state, cfg,
                             dropout_rng, grads, &clipped);
      rec.clipped_steps += clipped;
      ++batches;
    }
    rec.train_loss = loss_sum / static_cast<double>(batches);
    if (hooks.validator) {
      rec.val_macro_f1 = hooks.validator(model, epoch);
    } else if (!val_docs.empty()) {
      auto e = evaluate(model, val_docs, codes, {5}, cfg.threshold);
      rec.val_macro_f1 = e.macro_f1;
      rec.val_micro_f1 = e.micro_f1;
      rec.val_macro_auc = e.macro_auc;
      rec.val_micro_auc = e.micro_auc;
      rec.val_p5 = e.p_at(5).value_or(0.0);
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);

    if (rec.val_macro_f1 > result.best_macro_f1) {
      result.best_macro_f1 = rec.val_macro_f1;
      result.best_epoch = epoch;
      result.best = model;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Grid search

struct GridSpec {
  std::vector<double> learning_rates = {0.0001, 0.0003, 0.001, 0.003};
  std::vector<std::size_t> filter_widths = {2, 4, 6, 8, 10};
  std::vector<std::size_t> num_filters = {50, 100, 200, 500};
  std::vector<double> dropouts = {0.2, 0.5, 0.8};

  std::size_t size() const {
    return learning_rates.size() * filter_widths.size() * num_filters.size() * dropouts.size();
  }
};

struct GridRow {
  double learning_rate = 0;
  std::size_t filter_width = 0;
  std::size_t num_filters = 0;
  double dropout = 0;
  double val_macro_f1 = 0;
  std::size_t best_epoch = 0;
  std::size_t grid_index = 0;
};

// Trains one model per grid point (same init seed everywhere) and returns
// rows sorted by validation macro-F1, best first; ties keep grid order.
inline std::vector<GridRow> grid_search(const GridSpec& grid, const std::vector<Document>& train_docs,
                                        const std::vector<Document>& val_docs, const std::vector<std::string>& codes,
                                        std::size_t vocab_size, const ModelConfig& base_model,
                                        const TrainConfig& base_train, std::uint64_t init_seed,
                                        const EmbeddingTable* pretrained = nullptr,
                                        const std::function<void(const GridRow&)>& on_row = {}) {
  if (grid.size() == 0) throw std::invalid_argument("grid_search: empty grid");
  std::vector<GridRow> rows;
  for (double lr : grid.learning_rates)
    for (std::size_t k : grid.filter_widths)
      for (std::size_t dc : grid.num_filters)
        for (double q : grid.dropouts) {
          ModelConfig mc = base_model;
          mc.filter_width = k;
          mc.num_filters = dc;
          mc.dropout = q;
          TrainConfig tc = base_train;
          tc.learning_rate = lr;
          auto res = train(init_model(mc, vocab_size, init_seed, pretrained), train_docs, val_docs, codes, tc);
          GridRow row{lr, k, dc, q, res.best_macro_f1, res.best_epoch, rows.size()};
          if (on_row) on_row(row);
          rows.push_back(row);
        }
  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) { return a.val_macro_f1 > b.val_macro_f1; });
  return rows;
}

inline void write_grid_report(const std::vector<GridRow>& rows, std::ostream& os) {
  os << "# swam grid-search report (sorted by validation macro-F1)\n";
  os << "rank\tlearning_rate\tfilter_width\tnum_filters\tdropout\tval_macro_f1\tbest_epoch\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << i + 1 << '\t' << format_double(r.learning_rate) << '\t' << r.filter_width << '\t' << r.num_filters << '\t'
       << format_double(r.dropout) << '\t' << detail::fmt_metric(r.val_macro_f1) << '\t' << r.best_epoch << '\n';
  }
}

}  // namespace swam

#endif  // SWAM_TRAIN_HPP
