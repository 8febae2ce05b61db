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

// Experiment orchestration: datasets on disk, the experiment plan, width
// ablation, data-order shuffle study and run manifests.

#ifndef SWAM_HARNESS_HPP
#define SWAM_HARNESS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "swam/corpus.hpp"
#include "swam/embedding.hpp"
#include "swam/explain.hpp"
#include "swam/metrics.hpp"
#include "swam/model.hpp"
#include "swam/train.hpp"

namespace swam {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON schemas

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  j["num_labels"] = s.num_labels;
  j["label_triggers"] = s.label_triggers;
  j["generic_triggers"] = nlohmann::json::array();
  for (const auto& g : s.generic_triggers) j["generic_triggers"].push_back({{"ngram", g.ngram}, {"labels", g.labels}});
  j["generic_rate"] = s.generic_rate;
  j["filler_vocab_size"] = s.filler_vocab_size;
  j["min_length"] = s.min_length;
  j["max_length"] = s.max_length;
  j["label_prior"] = s.label_prior;
  j["noise_rate"] = s.noise_rate;
  j["min_labels_per_doc"] = s.min_labels_per_doc;
}

inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  SyntheticSpec d;
  s.num_labels = j.at("num_labels");
  s.label_triggers = j.at("label_triggers").get<std::vector<std::vector<NGram>>>();
  s.generic_triggers.clear();
  for (const auto& g : j.value("generic_triggers", nlohmann::json::array())) {
    s.generic_triggers.push_back({g.at("ngram").get<NGram>(), g.at("labels").get<std::vector<std::size_t>>()});
  }
  s.generic_rate = j.value("generic_rate", d.generic_rate);
  s.filler_vocab_size = j.value("filler_vocab_size", d.filler_vocab_size);
  s.min_length = j.value("min_length", d.min_length);
  s.max_length = j.value("max_length", d.max_length);
  s.label_prior = j.value("label_prior", d.label_prior);
  s.noise_rate = j.value("noise_rate", d.noise_rate);
  s.min_labels_per_doc = j.value("min_labels_per_doc", d.min_labels_per_doc);
}

inline SyntheticSpec load_synthetic_spec(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path)).get<SyntheticSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path, 0, std::string("bad synthetic spec: ") + e.what());
  }
}

inline void save_json(const nlohmann::json& j, const std::string& path) { open_for_write(path) << j.dump(2) << '\n'; }

inline void to_json(nlohmann::json& j, const CbowConfig& c) {
  j = {{"dim", c.dim},
       {"context_window", c.context_window},
       {"negative_samples", c.negative_samples},
       {"epochs", c.epochs},
       {"learning_rate", c.learning_rate},
       {"subsample_threshold", c.subsample_threshold},
       {"seed", c.seed},
       {"threads", c.threads}};
}

inline void from_json(const nlohmann::json& j, CbowConfig& c) {
  CbowConfig d;
  c.dim = j.value("dim", d.dim);
  c.context_window = j.value("context_window", d.context_window);
  c.negative_samples = j.value("negative_samples", d.negative_samples);
  c.epochs = j.value("epochs", d.epochs);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.subsample_threshold = j.value("subsample_threshold", d.subsample_threshold);
  c.seed = j.value("seed", d.seed);
  c.threads = j.value("threads", d.threads);
}

// ---------------------------------------------------------------------------
// The planted-snippet corpus used for desk-scale verification: 50 labels,
// 60 bigram triggers over fresh words (ten labels get a second trigger),
// 5 generic bigrams shared by 3 labels each, and 5% label noise.

struct PlantedCorpusOptions {
  PlantedSpecOptions triggers{50, 60, 2, 0, 5, 3, 0};
  double label_prior = 0.2;
  double noise_rate = 0.05;
  std::size_t min_length = 40;
  std::size_t max_length = 80;
  std::size_t filler_vocab_size = 400;
};

inline void to_json(nlohmann::json& j, const PlantedCorpusOptions& o) {
  j = {{"num_labels", o.triggers.num_labels},
       {"num_triggers", o.triggers.num_triggers},
       {"ngram_length", o.triggers.ngram_length},
       {"word_pool", o.triggers.word_pool},
       {"num_generic", o.triggers.num_generic},
       {"labels_per_generic", o.triggers.labels_per_generic},
       {"label_prior", o.label_prior},
       {"noise_rate", o.noise_rate},
       {"min_length", o.min_length},
       {"max_length", o.max_length},
       {"filler_vocab_size", o.filler_vocab_size}};
}

inline void from_json(const nlohmann::json& j, PlantedCorpusOptions& o) {
  PlantedCorpusOptions d;
  o.triggers.num_labels = j.value("num_labels", d.triggers.num_labels);
  o.triggers.num_triggers = j.value("num_triggers", d.triggers.num_triggers);
  o.triggers.ngram_length = j.value("ngram_length", d.triggers.ngram_length);
  o.triggers.word_pool = j.value("word_pool", d.triggers.word_pool);
  o.triggers.num_generic = j.value("num_generic", d.triggers.num_generic);
  o.triggers.labels_per_generic = j.value("labels_per_generic", d.triggers.labels_per_generic);
  o.label_prior = j.value("label_prior", d.label_prior);
  o.noise_rate = j.value("noise_rate", d.noise_rate);
  o.min_length = j.value("min_length", d.min_length);
  o.max_length = j.value("max_length", d.max_length);
  o.filler_vocab_size = j.value("filler_vocab_size", d.filler_vocab_size);
}

inline SyntheticSpec planted_corpus_spec(const PlantedCorpusOptions& o, std::uint64_t seed) {
  PlantedSpecOptions t = o.triggers;
  t.seed = seed;
  SyntheticSpec s = make_planted_spec(t);
  s.label_prior = o.label_prior;
  s.noise_rate = o.noise_rate;
  s.min_length = o.min_length;
  s.max_length = o.max_length;
  s.filler_vocab_size = o.filler_vocab_size;
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
  LabelSpace labels;
  Vocabulary vocab;
  std::vector<RawRecord> train_records, validation_records, test_records;
  std::vector<Document> train, validation, test;
  std::size_t max_len = 2500;
  std::size_t min_doc_freq = 3;
  std::vector<std::string> no_train_positive;
  std::vector<std::string> no_positive;
  std::vector<std::string> dropped_empty;  // records with no tokens after preprocessing

  const std::vector<Document>& split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "validation" || name == "val") return validation;
    if (name == "test") return test;
    throw std::invalid_argument("unknown split: " + name);
  }
};

namespace detail {
inline std::vector<Document> encode_keep(const std::vector<RawRecord>& in, std::vector<RawRecord>& kept,
                                         const Vocabulary& v, const LabelSpace& s, std::size_t max_len,
                                         std::vector<std::string>& dropped) {
  std::vector<Document> docs;
  kept.clear();
  for (const auto& r : in) {
    try {
      docs.push_back(encode(r, v, s, max_len));
      kept.push_back(r);
    } catch (const EmptyDocumentError&) {
      dropped.push_back(r.doc_id);
    }
  }
  return docs;
}
}  // namespace detail

// Builds the vocabulary on the training split and encodes all three splits.
// Records that tokenize to nothing are dropped and listed.
inline Dataset make_dataset(std::vector<RawRecord> train, std::vector<RawRecord> validation,
                            std::vector<RawRecord> test, LabelSpace labels, std::size_t min_doc_freq,
                            std::size_t max_len) {
  Dataset ds;
  ds.labels = std::move(labels);
  ds.max_len = max_len;
  ds.min_doc_freq = min_doc_freq;
  ds.vocab = build_vocabulary(train, min_doc_freq);
  ds.train = detail::encode_keep(train, ds.train_records, ds.vocab, ds.labels, max_len, ds.dropped_empty);
  ds.validation = detail::encode_keep(validation, ds.validation_records, ds.vocab, ds.labels, max_len, ds.dropped_empty);
  ds.test = detail::encode_keep(test, ds.test_records, ds.vocab, ds.labels, max_len, ds.dropped_empty);
  if (ds.train.empty()) throw EmptyCorpusError();
  std::vector<bool> tr(ds.labels.size(), false), any(ds.labels.size(), false);
  for (const auto* docs : {&ds.train, &ds.validation, &ds.test})
    for (const auto& d : *docs)
      for (std::size_t l = 0; l < d.labels.size(); ++l)
        if (d.labels[l]) {
          any[l] = true;
          if (docs == &ds.train) tr[l] = true;
        }
  for (std::size_t l = 0; l < ds.labels.size(); ++l) {
    if (!tr[l]) ds.no_train_positive.push_back(ds.labels.code(l));
    if (!any[l]) ds.no_positive.push_back(ds.labels.code(l));
  }
  return ds;
}

inline Dataset make_dataset(const std::vector<RawRecord>& records, const LabelSpace& labels, std::uint64_t seed,
                            std::size_t min_doc_freq, std::size_t max_len, SplitRatios ratios = {}) {
  auto s = split_corpus(records, labels, seed, ratios);
  return make_dataset(std::move(s.train), std::move(s.validation), std::move(s.test), labels, min_doc_freq, max_len);
}

inline const char* kDatasetFiles[] = {"train.tsv", "validation.tsv", "test.tsv", "labels.txt", "vocab.tsv", "dataset.json"};

inline void save_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  write_corpus(ds.train_records, dir + "/train.tsv");
  write_corpus(ds.validation_records, dir + "/validation.tsv");
  write_corpus(ds.test_records, dir + "/test.tsv");
  save_label_space(ds.labels, dir + "/labels.txt");
  save_vocabulary(ds.vocab, dir + "/vocab.tsv");
  nlohmann::json meta = {{"max_len", ds.max_len},
                         {"min_doc_freq", ds.min_doc_freq},
                         {"sizes", {{"train", ds.train.size()}, {"validation", ds.validation.size()}, {"test", ds.test.size()}}},
                         {"vocab_size", ds.vocab.size()},
                         {"labels_without_train_positive", ds.no_train_positive},
                         {"labels_without_any_positive", ds.no_positive},
                         {"dropped_empty_records", ds.dropped_empty}};
  save_json(meta, dir + "/dataset.json");
}

inline Dataset load_dataset(const std::string& dir) {
  for (const char* f : kDatasetFiles) {
    if (!fs::exists(dir + "/" + f)) throw IoError("dataset file missing: " + dir + "/" + f);
  }
  auto meta = nlohmann::json::parse(read_file(dir + "/dataset.json"));
  Dataset ds;
  ds.labels = load_label_space(dir + "/labels.txt");
  ds.max_len = meta.at("max_len");
  ds.min_doc_freq = meta.at("min_doc_freq");
  ds.vocab = load_vocabulary(dir + "/vocab.tsv", ds.min_doc_freq);
  ds.no_train_positive = meta.value("labels_without_train_positive", std::vector<std::string>{});
  ds.no_positive = meta.value("labels_without_any_positive", std::vector<std::string>{});
  ds.train = detail::encode_keep(read_corpus(dir + "/train.tsv"), ds.train_records, ds.vocab, ds.labels, ds.max_len, ds.dropped_empty);
  ds.validation = detail::encode_keep(read_corpus(dir + "/validation.tsv"), ds.validation_records, ds.vocab, ds.labels, ds.max_len, ds.dropped_empty);
  ds.test = detail::encode_keep(read_corpus(dir + "/test.tsv"), ds.test_records, ds.vocab, ds.labels, ds.max_len, ds.dropped_empty);
  return ds;
}

// ---------------------------------------------------------------------------
// Experiment plan: every knob of every stage, so a run can be replayed from
// the plan recorded in its manifest.

struct ExperimentPlan {
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Corpus sources
  std::string corpus_path, labels_path;
  std::string train_path, validation_path, test_path;
  std::size_t top_k_labels = 50;
  std::size_t min_doc_freq = 3;
  std::size_t max_len = 2500;
  SplitRatios ratios;

  // Synthetic corpus
  std::string synthetic_spec_path;  // explicit spec file; otherwise `planted`
  PlantedCorpusOptions planted;
  std::size_t synthetic_docs = 2000;

  std::string data_dir;
  std::string embeddings_path;
  std::string checkpoint_path;

  CbowConfig embedding;
  ModelConfig model;
  TrainConfig train;

  std::string eval_split = "test";
  std::vector<std::size_t> n_list = {5};
  GridSpec grid;
  std::vector<std::size_t> widths = {20, 200};
  std::vector<std::uint64_t> shuffle_seeds = {1, 2};
  std::vector<std::string> explain_labels;
  std::size_t census_top_m = 5;
};

inline void to_json(nlohmann::json& j, const ExperimentPlan& p) {
  j["seed"] = p.seed;
  j["out_dir"] = p.out_dir;
  j["corpus_path"] = p.corpus_path;
  j["labels_path"] = p.labels_path;
  j["train_path"] = p.train_path;
  j["validation_path"] = p.validation_path;
  j["test_path"] = p.test_path;
  j["top_k_labels"] = p.top_k_labels;
  j["min_doc_freq"] = p.min_doc_freq;
  j["max_len"] = p.max_len;
  j["split_ratios"] = {{"train", p.ratios.train}, {"validation", p.ratios.validation}};
  j["synthetic_spec_path"] = p.synthetic_spec_path;
  j["planted"] = p.planted;
  j["synthetic_docs"] = p.synthetic_docs;
  j["data_dir"] = p.data_dir;
  j["embeddings_path"] = p.embeddings_path;
  j["checkpoint_path"] = p.checkpoint_path;
  j["embedding"] = p.embedding;
  j["model"] = p.model;
  j["train"] = p.train;
  j["eval_split"] = p.eval_split;
  j["n_list"] = p.n_list;
  j["grid"] = {{"learning_rates", p.grid.learning_rates},
               {"filter_widths", p.grid.filter_widths},
               {"num_filters", p.grid.num_filters},
               {"dropouts", p.grid.dropouts}};
  j["widths"] = p.widths;
  j["shuffle_seeds"] = p.shuffle_seeds;
  j["explain_labels"] = p.explain_labels;
  j["census_top_m"] = p.census_top_m;
}

inline void from_json(const nlohmann::json& j, ExperimentPlan& p) {
  ExperimentPlan d;
  p.seed = j.value("seed", d.seed);
  p.out_dir = j.value("out_dir", d.out_dir);
  p.corpus_path = j.value("corpus_path", d.corpus_path);
  p.labels_path = j.value("labels_path", d.labels_path);
  p.train_path = j.value("train_path", d.train_path);
  p.validation_path = j.value("validation_path", d.validation_path);
  p.test_path = j.value("test_path", d.test_path);
  p.top_k_labels = j.value("top_k_labels", d.top_k_labels);
  p.min_doc_freq = j.value("min_doc_freq", d.min_doc_freq);
  p.max_len = j.value("max_len", d.max_len);
  if (j.contains("split_ratios")) {
    p.ratios.train = j["split_ratios"].value("train", d.ratios.train);
    p.ratios.validation = j["split_ratios"].value("validation", d.ratios.validation);
  }
  p.synthetic_spec_path = j.value("synthetic_spec_path", d.synthetic_spec_path);
  if (j.contains("planted")) p.planted = j["planted"].get<PlantedCorpusOptions>();
  p.synthetic_docs = j.value("synthetic_docs", d.synthetic_docs);
  p.data_dir = j.value("data_dir", d.data_dir);
  p.embeddings_path = j.value("embeddings_path", d.embeddings_path);
  p.checkpoint_path = j.value("checkpoint_path", d.checkpoint_path);
  if (j.contains("embedding")) p.embedding = j["embedding"].get<CbowConfig>();
  if (j.contains("model")) p.model = j["model"].get<ModelConfig>();
  if (j.contains("train")) p.train = j["train"].get<TrainConfig>();
  p.eval_split = j.value("eval_split", d.eval_split);
  p.n_list = j.value("n_list", d.n_list);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    p.grid.learning_rates = g.value("learning_rates", d.grid.learning_rates);
    p.grid.filter_widths = g.value("filter_widths", d.grid.filter_widths);
    p.grid.num_filters = g.value("num_filters", d.grid.num_filters);
    p.grid.dropouts = g.value("dropouts", d.grid.dropouts);
  }
  p.widths = j.value("widths", d.widths);
  p.shuffle_seeds = j.value("shuffle_seeds", d.shuffle_seeds);
  p.explain_labels = j.value("explain_labels", d.explain_labels);
  p.census_top_m = j.value("census_top_m", d.census_top_m);
}

// Reads a plan file. Accepts either a bare plan or a run manifest, whose
// "plan" member is used.
inline ExperimentPlan load_plan(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
    if (j.contains("plan")) j = j["plan"];
    return j.get<ExperimentPlan>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path, 0, std::string("bad experiment plan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Width ablation

struct WidthRun {
  std::size_t num_filters = 0;
  TrainResult training;
  EvalResult eval;
};

struct AblationSetup {
  ModelConfig model;  // num_filters is overridden per width
  TrainConfig train;
  std::vector<std::size_t> widths;
  std::vector<std::size_t> n_list = {5};
  std::uint64_t init_seed = 1;
  const EmbeddingTable* embeddings = nullptr;
  std::string eval_split = "test";
};

struct AblationReport {
  std::vector<WidthRun> runs;  // in the order of `widths`
  std::optional<ZeroPrecisionDiff> narrow_vs_wide;  // first vs last width

  std::size_t zero_f1_count(std::size_t run) const {
    std::size_t z = 0;
    for (const auto& l : runs.at(run).eval.per_label) z += l.support > 0 && l.f1 == 0.0;
    return z;
  }
};

inline WidthRun train_and_evaluate(const Dataset& ds, ModelConfig mc, const TrainConfig& tc, std::uint64_t init_seed,
                                   const EmbeddingTable* emb, const std::vector<std::size_t>& n_list,
                                   const std::string& split) {
  mc.num_labels = ds.labels.size();
  WidthRun run;
  run.num_filters = mc.num_filters;
  run.training = train(init_model(mc, ds.vocab.size(), init_seed, emb), ds.train, ds.validation, ds.labels.codes(), tc);
  run.eval = evaluate(run.training.best, ds.split(split), ds.labels.codes(), n_list, tc.threshold);
  return run;
}

// Trains one model per width with everything else identical (data, init
// seed, data order, hyperparameters) and evaluates each on `eval_split`.
inline AblationReport run_ablation(const Dataset& ds, const AblationSetup& setup) {
  if (setup.widths.empty()) throw std::invalid_argument("run_ablation: need at least one width");
  AblationReport rep;
  for (auto w : setup.widths) {
    ModelConfig mc = setup.model;
    mc.num_filters = w;
    rep.runs.push_back(train_and_evaluate(ds, mc, setup.train, setup.init_seed, setup.embeddings, setup.n_list,
                                          setup.eval_split));
  }
  if (rep.runs.size() >= 2) rep.narrow_vs_wide = compare_zero_precision(rep.runs.front().eval, rep.runs.back().eval);
  return rep;
}

namespace detail {
inline std::string codes_line(const std::vector<std::string>& v) {
  std::string s = std::to_string(v.size());
  for (const auto& c : v) s += ' ' + c;
  return s;
}
}  // namespace detail

inline void write_ablation_report(const AblationReport& rep, std::ostream& os) {
  using detail::fmt_metric;
  os << "# swam width-ablation report\n";
  if (rep.runs.size() == 1) {
    write_eval_report(rep.runs.front().eval, os, "evaluation (single width " + std::to_string(rep.runs.front().num_filters) + ")");
    return;
  }
  os << "\n[summary]\nnum_filters\tbest_epoch\tauc_macro\tauc_micro\tf1_macro\tf1_micro";
  for (auto& [n, v] : rep.runs.front().eval.precision_at) os << "\tp@" << n;
  os << "\tzero_f1_labels\n";
  for (std::size_t r = 0; r < rep.runs.size(); ++r) {
    const auto& run = rep.runs[r];
    os << run.num_filters << '\t' << run.training.best_epoch << '\t' << fmt_metric(run.eval.macro_auc) << '\t'
       << fmt_metric(run.eval.micro_auc) << '\t' << fmt_metric(run.eval.macro_f1) << '\t' << fmt_metric(run.eval.micro_f1);
    for (auto& [n, v] : run.eval.precision_at) os << '\t' << fmt_metric(v);
    os << '\t' << rep.zero_f1_count(r) << '\n';
  }
  const auto& a = rep.runs.front().eval;
  const auto& b = rep.runs.back().eval;
  os << "\n[delta_last_minus_first]\nf1_macro\t" << fmt_metric(b.macro_f1 - a.macro_f1) << "\nf1_micro\t"
     << fmt_metric(b.micro_f1 - a.micro_f1) << '\n';
  if (rep.narrow_vs_wide) {
    const auto& d = *rep.narrow_vs_wide;
    os << "\n[zero_precision]\n";
    for (const auto& run : rep.runs) os << "filters_" << run.num_filters << '\t' << detail::codes_line(run.eval.zero_precision_labels) << '\n';
    os << "both\t" << detail::codes_line(d.both) << "\nrecovered\t" << detail::codes_line(d.only_a) << "\nlost\t"
       << detail::codes_line(d.only_b) << '\n';
    double psum = 0.0;
    for (const auto& code : d.only_a)
      for (const auto& l : b.per_label)
        if (l.code == code) psum += l.precision;
    os << "recovered_mean_precision\t" << (d.only_a.empty() ? "n/a" : fmt_metric(psum / static_cast<double>(d.only_a.size()))) << '\n';
  }
  os << "\n[per_label]\ncode\tsupport";
  for (const auto& run : rep.runs) os << "\tf1_" << run.num_filters;
  for (const auto& run : rep.runs) os << "\tprecision_" << run.num_filters;
  os << '\n';
  for (std::size_t l = 0; l < a.per_label.size(); ++l) {
    os << a.per_label[l].code << '\t' << a.per_label[l].support;
    for (const auto& run : rep.runs) os << '\t' << fmt_metric(run.eval.per_label[l].f1);
    for (const auto& run : rep.runs) os << '\t' << fmt_metric(run.eval.per_label[l].precision);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Data-order shuffle study

struct ShuffleRow {
  std::size_t num_filters = 0;
  std::vector<WidthRun> runs;  // one per shuffle seed
  bool zero_sets_identical() const {
    for (std::size_t i = 1; i < runs.size(); ++i)
      if (runs[i].eval.zero_precision_labels != runs[0].eval.zero_precision_labels) return false;
    return true;
  }
};

struct ShuffleReport {
  std::vector<std::uint64_t> shuffle_seeds;
  std::vector<ShuffleRow> rows;  // one per width
};

// Retrains every width once per data-order seed; initialization, dropout and
// hyperparameters stay fixed so only the order of training documents varies.
inline ShuffleReport run_shuffle_study(const Dataset& ds, const AblationSetup& setup,
                                       const std::vector<std::uint64_t>& shuffle_seeds) {
  if (shuffle_seeds.size() < 2) throw std::invalid_argument("run_shuffle_study: need two shuffle seeds");
  ShuffleReport rep;
  rep.shuffle_seeds = shuffle_seeds;
  for (auto w : setup.widths) {
    ShuffleRow row;
    row.num_filters = w;
    for (auto s : shuffle_seeds) {
      ModelConfig mc = setup.model;
      mc.num_filters = w;
      TrainConfig tc = setup.train;
      tc.shuffle_seed = s;
      row.runs.push_back(train_and_evaluate(ds, mc, tc, setup.init_seed, setup.embeddings, setup.n_list, setup.eval_split));
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline void write_shuffle_report(const ShuffleReport& rep, std::ostream& os) {
  os << "# swam data-order shuffle report\n";
  os << "shuffle_seeds";
  for (auto s : rep.shuffle_seeds) os << ' ' << s;
  os << "\n\n[zero_precision_labels]\nnum_filters\tshuffle_seed\tf1_macro\tzero_precision\n";
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.runs.size(); ++i) {
      os << row.num_filters << '\t' << rep.shuffle_seeds[i] << '\t' << detail::fmt_metric(row.runs[i].eval.macro_f1)
         << '\t' << detail::codes_line(row.runs[i].eval.zero_precision_labels) << '\n';
    }
  }
  os << "\n[changes]\nnum_filters\tidentical\tonly_first\tonly_second\n";
  for (const auto& row : rep.rows) {
    auto d = compare_zero_precision(row.runs.front().eval, row.runs.back().eval);
    os << row.num_filters << '\t' << (row.zero_sets_identical() ? "yes" : "no") << '\t' << detail::codes_line(d.only_a)
       << '\t' << detail::codes_line(d.only_b) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Manifests

inline nlohmann::json make_manifest(const std::string& command, const ExperimentPlan& plan,
                                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["tool"] = "swam";
  m["version"] = std::string(kVersion);
  m["command"] = command;
  m["seed"] = plan.seed;
  m["plan"] = plan;
  m["inputs"] = nlohmann::json::object();
  for (const auto& p : inputs)
    if (!p.empty() && fs::is_regular_file(p)) m["inputs"][p] = sha256_file(p);
  m["outputs"] = nlohmann::json::object();
  for (const auto& p : outputs)
    if (fs::is_regular_file(p)) m["outputs"][fs::path(p).filename().string()] = sha256_file(p);
  return m;
}

}  // namespace swam

#endif  // SWAM_HARNESS_HPP
