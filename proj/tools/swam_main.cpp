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

// swam: command-line driver for the experiment pipeline.
//
// Every subcommand writes its artifacts under --out with fixed file names and
// finishes by writing manifest.json, which records the resolved plan and the
// SHA-256 of every input and output. `--config <plan-or-manifest.json>`
// seeds all option defaults, so `swam <cmd> --config out/manifest.json
// --out out2` replays a run; flags given on the command line still win.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swam/swam.hpp"

namespace fs = std::filesystem;
using namespace swam;

namespace {

struct Context {
  ExperimentPlan plan;
  bool quiet = false;
  bool timing = false;
};

// Finds `--config <path>` or `--config=<path>` ahead of the real parse so the
// plan can supply defaults for every other option.
std::string prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw IoError("missing required " + what + " path");
  if (!fs::is_regular_file(path)) throw IoError(what + " not found: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
  if (path.empty()) throw IoError("missing required " + what + " path");
  if (!fs::is_directory(path)) throw IoError(what + " not found: " + path);
}

std::string out_path(const Context& ctx, const std::string& name) { return ctx.plan.out_dir + "/" + name; }

void finish(const Context& ctx, const std::string& command, const std::vector<std::string>& inputs,
            const std::vector<std::string>& outputs) {
  save_json(make_manifest(command, ctx.plan, inputs, outputs), out_path(ctx, "manifest.json"));
  if (!ctx.quiet) {
    for (const auto& o : outputs) std::cerr << "wrote " << o << '\n';
  }
}

std::vector<std::string> dataset_inputs(const std::string& dir) {
  std::vector<std::string> v;
  for (const char* f : kDatasetFiles) v.push_back(dir + "/" + f);
  return v;
}

Dataset open_dataset(const Context& ctx) {
  require_dir(ctx.plan.data_dir, "data directory");
  return load_dataset(ctx.plan.data_dir);
}

// Pretrained vectors, when given, fix the embedding dimension.
std::optional<EmbeddingTable> open_embeddings(Context& ctx, const Dataset& ds) {
  if (ctx.plan.embeddings_path.empty()) return std::nullopt;
  require_file(ctx.plan.embeddings_path, "embedding file");
  auto loaded = load_embeddings(ctx.plan.embeddings_path, ds.vocab, 0, ctx.plan.seed);
  ctx.plan.model.embed_dim = static_cast<std::size_t>(loaded.table.vectors.cols());
  if (!ctx.quiet && !loaded.missing.empty()) {
    std::cerr << loaded.missing.size() << " vocabulary tokens missing from " << ctx.plan.embeddings_path
              << "; initialized randomly\n";
  }
  return std::move(loaded.table);
}

LoadedCheckpoint open_checkpoint(const Context& ctx, const Dataset& ds) {
  require_file(ctx.plan.checkpoint_path, "checkpoint");
  auto ck = load_checkpoint(ctx.plan.checkpoint_path);
  if (ck.meta.label_codes != ds.labels.codes()) {
    throw Error("checkpoint label space does not match dataset labels: " + ctx.plan.checkpoint_path);
  }
  if (static_cast<std::size_t>(ck.model.params.embedding.rows()) != ds.vocab.size()) {
    throw Error("checkpoint vocabulary size does not match dataset vocabulary: " + ctx.plan.checkpoint_path);
  }
  return ck;
}

TrainHooks progress_hooks(const Context& ctx, const std::string& tag) {
  TrainHooks h;
  if (!ctx.quiet) {
    h.on_epoch = [tag](const EpochRecord& r) {
      std::cerr << tag << " epoch " << r.epoch << " loss " << detail::fmt_metric(r.train_loss) << " val_f1_macro "
                << detail::fmt_metric(r.val_macro_f1) << " val_p@5 " << detail::fmt_metric(r.val_p5) << " ("
                << detail::fmt_metric(r.wall_time_s) << "s)\n";
    };
  }
  return h;
}

void normalize_seeds(ExperimentPlan& p) {
  p.embedding.seed = p.seed;
  p.train.seed = p.seed;
}

void write_text(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  auto os = open_for_write(path);
  fn(os);
}

// --------------------------------------------------------------------------
// Subcommands

void cmd_synth(Context& ctx) {
  auto& p = ctx.plan;
  SyntheticSpec spec;
  std::vector<std::string> inputs;
  if (!p.synthetic_spec_path.empty()) {
    require_file(p.synthetic_spec_path, "synthetic spec");
    spec = load_synthetic_spec(p.synthetic_spec_path);
    inputs.push_back(p.synthetic_spec_path);
  } else {
    spec = planted_corpus_spec(p.planted, p.seed);
  }
  validate(spec);
  fs::create_directories(p.out_dir);
  auto records = generate_synthetic(spec, p.synthetic_docs, p.seed);
  write_corpus(records, out_path(ctx, "corpus.tsv"));
  save_label_space(synthetic_label_space(spec), out_path(ctx, "labels.txt"));
  save_json(nlohmann::json(spec), out_path(ctx, "synthetic_spec.json"));
  finish(ctx, "synth", inputs,
         {out_path(ctx, "corpus.tsv"), out_path(ctx, "labels.txt"), out_path(ctx, "synthetic_spec.json")});
}

void cmd_preprocess(Context& ctx) {
  auto& p = ctx.plan;
  std::vector<std::string> inputs;
  Dataset ds;
  const bool presplit = !p.train_path.empty() || !p.validation_path.empty() || !p.test_path.empty();
  if (presplit) {
    require_file(p.train_path, "training corpus");
    require_file(p.validation_path, "validation corpus");
    require_file(p.test_path, "test corpus");
    inputs = {p.train_path, p.validation_path, p.test_path};
    auto tr = read_corpus(p.train_path), va = read_corpus(p.validation_path), te = read_corpus(p.test_path);
    LabelSpace space;
    if (!p.labels_path.empty()) {
      require_file(p.labels_path, "label file");
      inputs.push_back(p.labels_path);
      space = load_label_space(p.labels_path);
    } else {
      space = top_k_label_space(tr, p.top_k_labels);
      tr = filter_to_label_space(tr, space);
      va = filter_to_label_space(va, space);
      te = filter_to_label_space(te, space);
    }
    ds = make_dataset(std::move(tr), std::move(va), std::move(te), space, p.min_doc_freq, p.max_len);
  } else {
    require_file(p.corpus_path, "corpus");
    inputs.push_back(p.corpus_path);
    auto records = read_corpus(p.corpus_path);
    LabelSpace space;
    if (!p.labels_path.empty()) {
      require_file(p.labels_path, "label file");
      inputs.push_back(p.labels_path);
      space = load_label_space(p.labels_path);
    } else {
      space = top_k_label_space(records, p.top_k_labels);
      records = filter_to_label_space(records, space);
    }
    ds = make_dataset(records, space, p.seed, p.min_doc_freq, p.max_len, p.ratios);
  }
  save_dataset(ds, p.out_dir);
  if (!ctx.quiet) {
    std::cerr << "train " << ds.train.size() << " validation " << ds.validation.size() << " test " << ds.test.size()
              << " vocab " << ds.vocab.size() << " labels " << ds.labels.size() << '\n';
    if (!ds.no_train_positive.empty())
      std::cerr << "warning: " << ds.no_train_positive.size() << " labels have no training positive\n";
    if (!ds.dropped_empty.empty())
      std::cerr << "warning: dropped " << ds.dropped_empty.size() << " records with no tokens\n";
  }
  std::vector<std::string> outputs;
  for (const char* f : kDatasetFiles) outputs.push_back(out_path(ctx, f));
  finish(ctx, "preprocess", inputs, outputs);
}

void cmd_embed(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  fs::create_directories(p.out_dir);
  CbowTrainer trainer(ds.train, ds.vocab, p.embedding);
  for (std::size_t e = 0; e < p.embedding.epochs; ++e) {
    trainer.run_epoch();
    if (!ctx.quiet) std::cerr << "cbow epoch " << e + 1 << '/' << p.embedding.epochs << '\n';
  }
  save_embeddings(trainer.table(), ds.vocab, out_path(ctx, "embeddings.txt"));
  finish(ctx, "embed", dataset_inputs(p.data_dir), {out_path(ctx, "embeddings.txt")});
}

CheckpointMeta meta_for(const Context& ctx, const Dataset& ds, std::size_t best_epoch) {
  CheckpointMeta meta;
  meta.label_codes = ds.labels.codes();
  meta.seed = ctx.plan.seed;
  meta.extra = {{"best_epoch", best_epoch}, {"train", ctx.plan.train}};
  return meta;
}

void cmd_train(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  auto emb = open_embeddings(ctx, ds);
  p.model.num_labels = ds.labels.size();
  fs::create_directories(p.out_dir);
  auto model = init_model(p.model, ds.vocab.size(), p.seed, emb ? &*emb : nullptr);
  auto res = train(std::move(model), ds.train, ds.validation, ds.labels.codes(), p.train, progress_hooks(ctx, "train"));
  save_checkpoint(res.best, meta_for(ctx, ds, res.best_epoch), out_path(ctx, "checkpoint.swam"));
  write_text(out_path(ctx, "history.jsonl"), [&](std::ostream& os) { write_history(res.history, os, ctx.timing); });
  if (!ctx.quiet) {
    std::cerr << "best epoch " << res.best_epoch << " val_f1_macro " << detail::fmt_metric(res.best_macro_f1)
              << (res.early_stopped ? " (early stop)" : "") << '\n';
  }
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.embeddings_path);
  finish(ctx, "train", inputs, {out_path(ctx, "checkpoint.swam"), out_path(ctx, "history.jsonl")});
}

void cmd_eval(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  auto ck = open_checkpoint(ctx, ds);
  fs::create_directories(p.out_dir);
  auto e = evaluate(ck.model, ds.split(p.eval_split), ds.labels.codes(), p.n_list, p.train.threshold);
  write_text(out_path(ctx, "eval_report.txt"),
             [&](std::ostream& os) { write_eval_report(e, os, "evaluation on " + p.eval_split); });
  if (!ctx.quiet) write_eval_report(e, std::cout, "evaluation on " + p.eval_split);
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.checkpoint_path);
  finish(ctx, "eval", inputs, {out_path(ctx, "eval_report.txt")});
}

void cmd_grid(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  auto emb = open_embeddings(ctx, ds);
  p.model.num_labels = ds.labels.size();
  fs::create_directories(p.out_dir);
  auto rows = grid_search(p.grid, ds.train, ds.validation, ds.labels.codes(), ds.vocab.size(), p.model, p.train, p.seed,
                          emb ? &*emb : nullptr, [&](const GridRow& r) {
                            if (!ctx.quiet)
                              std::cerr << "grid " << r.grid_index + 1 << '/' << p.grid.size() << " val_f1_macro "
                                        << detail::fmt_metric(r.val_macro_f1) << '\n';
                          });
  write_text(out_path(ctx, "grid_report.txt"), [&](std::ostream& os) { write_grid_report(rows, os); });
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.embeddings_path);
  finish(ctx, "grid", inputs, {out_path(ctx, "grid_report.txt")});
}

AblationSetup ablation_setup(Context& ctx, const Dataset& ds, const EmbeddingTable* emb) {
  auto& p = ctx.plan;
  p.model.num_labels = ds.labels.size();
  AblationSetup s;
  s.model = p.model;
  s.train = p.train;
  s.widths = p.widths;
  s.n_list = p.n_list;
  s.init_seed = p.seed;
  s.embeddings = emb;
  s.eval_split = p.eval_split;
  return s;
}

std::string width_checkpoint(std::size_t w) { return "checkpoint_dc" + std::to_string(w) + ".swam"; }

void cmd_ablate(Context& ctx) {
  auto& p = ctx.plan;
  if (p.widths.empty()) throw std::invalid_argument("ablate: need at least one width");
  auto ds = open_dataset(ctx);
  auto emb = open_embeddings(ctx, ds);
  fs::create_directories(p.out_dir);
  auto rep = run_ablation(ds, ablation_setup(ctx, ds, emb ? &*emb : nullptr));
  std::vector<std::string> outputs;
  for (const auto& run : rep.runs) {
    const auto path = out_path(ctx, width_checkpoint(run.num_filters));
    save_checkpoint(run.training.best, meta_for(ctx, ds, run.training.best_epoch), path);
    outputs.push_back(path);
  }
  write_text(out_path(ctx, "ablation_report.txt"), [&](std::ostream& os) { write_ablation_report(rep, os); });
  outputs.push_back(out_path(ctx, "ablation_report.txt"));
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.embeddings_path);
  finish(ctx, "ablate", inputs, outputs);
}

void cmd_shuffle(Context& ctx) {
  auto& p = ctx.plan;
  if (p.shuffle_seeds.size() < 2) throw std::invalid_argument("shuffle-study: need two shuffle seeds");
  auto ds = open_dataset(ctx);
  auto emb = open_embeddings(ctx, ds);
  fs::create_directories(p.out_dir);
  auto rep = run_shuffle_study(ds, ablation_setup(ctx, ds, emb ? &*emb : nullptr), p.shuffle_seeds);
  write_text(out_path(ctx, "shuffle_report.txt"), [&](std::ostream& os) { write_shuffle_report(rep, os); });
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.embeddings_path);
  finish(ctx, "shuffle-study", inputs, {out_path(ctx, "shuffle_report.txt")});
}

std::optional<SyntheticSpec> optional_spec(const Context& ctx, std::vector<std::string>& inputs) {
  if (ctx.plan.synthetic_spec_path.empty()) return std::nullopt;
  require_file(ctx.plan.synthetic_spec_path, "synthetic spec");
  inputs.push_back(ctx.plan.synthetic_spec_path);
  return load_synthetic_spec(ctx.plan.synthetic_spec_path);
}

void cmd_explain(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  auto ck = open_checkpoint(ctx, ds);
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.checkpoint_path);
  auto spec = optional_spec(ctx, inputs);
  SnippetRequest req;
  req.threshold = p.train.threshold;
  for (const auto& code : p.explain_labels) {
    auto l = ds.labels.find(code);
    if (!l) throw std::invalid_argument("explain: unknown label code " + code);
    req.labels.push_back(*l);
  }
  fs::create_directories(p.out_dir);
  std::vector<Snippet> all;
  for (const auto& doc : ds.split(p.eval_split)) {
    auto pred = forward(doc, ck.model, Mode::kEval).prediction;
    auto s = extract_snippets(ck.model, pred, doc, ds.vocab, ds.labels.codes(), req);
    all.insert(all.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  write_text(out_path(ctx, "snippets.tsv"), [&](std::ostream& os) { write_snippet_report(all, os); });
  if (spec && !ctx.quiet) {
    auto st = snippet_trigger_overlap(ck.model, ds.split(p.eval_split), ds.vocab, ds.labels.codes(), *spec, req.threshold);
    std::cout << "trigger_overlap " << st.overlaps << '/' << st.pairs << ' ' << detail::fmt_metric(st.rate()) << '\n';
  }
  finish(ctx, "explain", inputs, {out_path(ctx, "snippets.tsv")});
}

void cmd_census(Context& ctx) {
  auto& p = ctx.plan;
  auto ds = open_dataset(ctx);
  auto ck = open_checkpoint(ctx, ds);
  auto inputs = dataset_inputs(p.data_dir);
  inputs.push_back(p.checkpoint_path);
  auto spec = optional_spec(ctx, inputs);
  fs::create_directories(p.out_dir);
  const auto& docs = ds.split(p.eval_split);
  auto reports = filter_census(ck.model, docs, p.census_top_m);
  write_text(out_path(ctx, "census.tsv"),
             [&](std::ostream& os) { write_census_report(reports, docs, ds.vocab, ds.labels.codes(), os); });
  if (spec && !ctx.quiet) {
    std::cout << "trigger_recovery " << detail::fmt_metric(census_trigger_recovery(reports, ds.vocab, *spec)) << '\n';
  }
  finish(ctx, "census", inputs, {out_path(ctx, "census.tsv")});
}

// --------------------------------------------------------------------------
// Option registration

void add_common(CLI::App* sc, Context& ctx, std::string& config) {
  sc->add_option("--config", config, "Experiment plan or run manifest (JSON) supplying defaults");
  sc->add_option("--out", ctx.plan.out_dir, "Output directory")->capture_default_str();
  sc->add_option("--seed", ctx.plan.seed, "Root seed")->capture_default_str();
  sc->add_flag("--quiet", ctx.quiet, "Suppress progress output");
}

void add_data(CLI::App* sc, Context& ctx) {
  sc->add_option("--data", ctx.plan.data_dir, "Preprocessed data directory")->capture_default_str();
}

void add_model(CLI::App* sc, Context& ctx) {
  auto& m = ctx.plan.model;
  sc->add_option("--embeddings", ctx.plan.embeddings_path, "Pretrained word2vec text file");
  sc->add_option("--embed-dim", m.embed_dim, "Embedding size d_e (ignored with --embeddings)")->capture_default_str();
  sc->add_option("--filters", m.num_filters, "Number of convolution filters d_c")->capture_default_str();
  sc->add_option("--filter-width", m.filter_width, "Filter width k")->capture_default_str();
  sc->add_option("--dropout", m.dropout, "Embedding dropout q")->capture_default_str();
  sc->add_option("--variant", m.variant, "Attention variant: per_label or max_pool")
      ->transform(CLI::CheckedTransformer(std::map<std::string, AttentionVariant>{
          {"per_label", AttentionVariant::kPerLabel}, {"max_pool", AttentionVariant::kMaxPool}}))
      ->default_str(to_string(m.variant));
}

void add_train(CLI::App* sc, Context& ctx) {
  auto& t = ctx.plan.train;
  sc->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  sc->add_option("--batch-size", t.batch_size, "Minibatch size")->capture_default_str();
  sc->add_option("--patience", t.patience, "Early-stopping patience (epochs)")->capture_default_str();
  sc->add_option("--max-epochs", t.max_epochs, "Maximum epochs")->capture_default_str();
  sc->add_option("--clip", t.gradient_clip, "Global gradient-norm clip (0 disables)")->capture_default_str();
  sc->add_flag("--freeze-embeddings", t.freeze_embeddings, "Do not update the embedding table");
  sc->add_option("--threshold", t.threshold, "Decision threshold")->capture_default_str();
  sc->add_flag("--timing", ctx.timing, "Include wall time in history.jsonl");
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::string config = prescan_config(argc, argv);
  try {
    if (!config.empty()) {
      require_file(config, "config");
      ctx.plan = load_plan(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  auto& p = ctx.plan;

  CLI::App app{"swam: shallow-and-wide attention CNN for multi-label document classification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a planted-snippet synthetic corpus");
  add_common(synth, ctx, config);
  synth->add_option("--spec", p.synthetic_spec_path, "Explicit synthetic spec (JSON); overrides the planted options");
  synth->add_option("--docs", p.synthetic_docs, "Number of documents")->capture_default_str();
  synth->add_option("--labels", p.planted.triggers.num_labels, "Number of labels")->capture_default_str();
  synth->add_option("--triggers", p.planted.triggers.num_triggers, "Non-generic triggers")->capture_default_str();
  synth->add_option("--ngram", p.planted.triggers.ngram_length, "Trigger n-gram length")->capture_default_str();
  synth->add_option("--word-pool", p.planted.triggers.word_pool, "Shared trigger word pool (0 = fresh words)")->capture_default_str();
  synth->add_option("--generic", p.planted.triggers.num_generic, "Generic triggers")->capture_default_str();
  synth->add_option("--labels-per-generic", p.planted.triggers.labels_per_generic, "Labels per generic trigger")->capture_default_str();
  synth->add_option("--prior", p.planted.label_prior, "Per-label positive rate")->capture_default_str();
  synth->add_option("--noise", p.planted.noise_rate, "Label-flip noise rate")->capture_default_str();
  synth->add_option("--min-length", p.planted.min_length, "Minimum document length")->capture_default_str();
  synth->add_option("--max-length", p.planted.max_length, "Maximum document length")->capture_default_str();
  synth->add_option("--filler-vocab", p.planted.filler_vocab_size, "Filler vocabulary size")->capture_default_str();

  auto* pre = app.add_subcommand("preprocess", "Tokenize, split and build the vocabulary");
  add_common(pre, ctx, config);
  pre->add_option("--corpus", p.corpus_path, "Corpus TSV (doc_id, codes, text) to split");
  pre->add_option("--train", p.train_path, "Pre-split training TSV");
  pre->add_option("--validation", p.validation_path, "Pre-split validation TSV");
  pre->add_option("--test", p.test_path, "Pre-split test TSV");
  pre->add_option("--labels", p.labels_path, "Label file (one code per line); default is the top-k codes");
  pre->add_option("--top-k", p.top_k_labels, "Label-space size when --labels is absent")->capture_default_str();
  pre->add_option("--min-doc-freq", p.min_doc_freq, "Minimum document frequency for vocabulary")->capture_default_str();
  pre->add_option("--max-len", p.max_len, "Truncation length in tokens")->capture_default_str();
  pre->add_option("--train-ratio", p.ratios.train, "Training fraction")->capture_default_str();
  pre->add_option("--validation-ratio", p.ratios.validation, "Validation fraction")->capture_default_str();

  auto* embed = app.add_subcommand("embed", "Pretrain CBOW word vectors on the training split");
  add_common(embed, ctx, config);
  add_data(embed, ctx);
  embed->add_option("--dim", p.embedding.dim, "Vector size")->capture_default_str();
  embed->add_option("--window", p.embedding.context_window, "Context window")->capture_default_str();
  embed->add_option("--negatives", p.embedding.negative_samples, "Negative samples")->capture_default_str();
  embed->add_option("--epochs", p.embedding.epochs, "Epochs")->capture_default_str();
  embed->add_option("--lr", p.embedding.learning_rate, "Initial learning rate")->capture_default_str();
  embed->add_option("--subsample", p.embedding.subsample_threshold, "Subsampling threshold")->capture_default_str();
  embed->add_option("--threads", p.embedding.threads, "Threads (>1 is non-deterministic)")->capture_default_str();

  auto* tr = app.add_subcommand("train", "Train a model with early stopping");
  add_common(tr, ctx, config);
  add_data(tr, ctx);
  add_model(tr, ctx);
  add_train(tr, ctx);

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(ev, ctx, config);
  add_data(ev, ctx);
  ev->add_option("--checkpoint", p.checkpoint_path, "Checkpoint file");
  ev->add_option("--split", p.eval_split, "train, validation or test")->capture_default_str();
  ev->add_option("--n", p.n_list, "P@n cut-offs")->capture_default_str();
  ev->add_option("--threshold", p.train.threshold, "Decision threshold")->capture_default_str();

  auto* grid = app.add_subcommand("grid", "Hyperparameter grid search on the validation split");
  add_common(grid, ctx, config);
  add_data(grid, ctx);
  add_model(grid, ctx);
  add_train(grid, ctx);
  grid->add_option("--grid-lr", p.grid.learning_rates, "Learning rates")->capture_default_str();
  grid->add_option("--grid-filter-width", p.grid.filter_widths, "Filter widths")->capture_default_str();
  grid->add_option("--grid-filters", p.grid.num_filters, "Filter counts")->capture_default_str();
  grid->add_option("--grid-dropout", p.grid.dropouts, "Dropout rates")->capture_default_str();

  auto* abl = app.add_subcommand("ablate", "Width ablation: one model per filter count");
  add_common(abl, ctx, config);
  add_data(abl, ctx);
  add_model(abl, ctx);
  add_train(abl, ctx);
  abl->add_option("--widths", p.widths, "Filter counts, narrow first")->capture_default_str();
  abl->add_option("--split", p.eval_split, "Evaluation split")->capture_default_str();
  abl->add_option("--n", p.n_list, "P@n cut-offs")->capture_default_str();

  auto* shf = app.add_subcommand("shuffle-study", "Retrain each width under two data-order seeds");
  add_common(shf, ctx, config);
  add_data(shf, ctx);
  add_model(shf, ctx);
  add_train(shf, ctx);
  shf->add_option("--widths", p.widths, "Filter counts")->capture_default_str();
  shf->add_option("--shuffle-seeds", p.shuffle_seeds, "Data-order seeds")->capture_default_str();
  shf->add_option("--split", p.eval_split, "Evaluation split")->capture_default_str();
  shf->add_option("--n", p.n_list, "P@n cut-offs")->capture_default_str();

  auto* exp = app.add_subcommand("explain", "Extract attention snippets");
  add_common(exp, ctx, config);
  add_data(exp, ctx);
  exp->add_option("--checkpoint", p.checkpoint_path, "Checkpoint file");
  exp->add_option("--split", p.eval_split, "Split to explain")->capture_default_str();
  exp->add_option("--label", p.explain_labels, "Label codes to explain (default: all predicted)");
  exp->add_option("--threshold", p.train.threshold, "Prediction threshold")->capture_default_str();
  exp->add_option("--synthetic-spec", p.synthetic_spec_path, "Report trigger overlap against this spec");

  auto* cen = app.add_subcommand("census", "Top-activating k-grams per filter");
  add_common(cen, ctx, config);
  add_data(cen, ctx);
  cen->add_option("--checkpoint", p.checkpoint_path, "Checkpoint file");
  cen->add_option("--split", p.eval_split, "Split to scan")->capture_default_str();
  cen->add_option("--top-m", p.census_top_m, "k-grams kept per filter")->capture_default_str();
  cen->add_option("--synthetic-spec", p.synthetic_spec_path, "Report trigger recovery against this spec");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (auto* sc : app.get_subcommands()) sub = sc;
    std::cerr << (sub ? sub->help() : app.help());
    return 2;
  }

  normalize_seeds(p);
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") cmd_synth(ctx);
    else if (name == "preprocess") cmd_preprocess(ctx);
    else if (name == "embed") cmd_embed(ctx);
    else if (name == "train") cmd_train(ctx);
    else if (name == "eval") cmd_eval(ctx);
    else if (name == "grid") cmd_grid(ctx);
    else if (name == "ablate") cmd_ablate(ctx);
    else if (name == "shuffle-study") cmd_shuffle(ctx);
    else if (name == "explain") cmd_explain(ctx);
    else if (name == "census") cmd_census(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
