// Copyright 2026 The TableQuery Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tablequery/abstraction.hpp"
#include "tablequery/backend.hpp"
#include "tablequery/chart.hpp"
#include "tablequery/harness.hpp"
#include "tablequery/pipeline.hpp"
#include "tablequery/rules.hpp"
#include "tablequery/scoring.hpp"
#include "tablequery/service.hpp"
#include "tablequery/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace tq;
using nlohmann::json;

namespace {

struct Common {
  std::string vocab_path;
  std::string model_path;
};

Vocabulary load_vocab(const Common& c) {
  return c.vocab_path.empty() ? Vocabulary::load_default() : Vocabulary::load(c.vocab_path, english_normalizer());
}

// A CSV path, or the name of a table under <data>/tables.
std::shared_ptr<const Table> load_table(const std::string& ref) {
  if (fs::exists(ref)) return std::make_shared<Table>(Table::load_csv(ref));
  const fs::path p = fs::path(data_dir()) / "tables" / (ref + ".csv");
  if (fs::exists(p)) return std::make_shared<Table>(Table::load_csv(p.string()));
  throw ValidationError("no table file or built-in table named " + ref);
}

std::string model_path(const Common& c) {
  if (!c.model_path.empty()) return c.model_path;
  if (const char* env = std::getenv("TQ_MODEL")) return env;
  return {};
}

std::unique_ptr<Model> maybe_model(const Common& c) {
  const std::string path = model_path(c);
  if (path.empty()) return nullptr;
  return load_model(path);
}

// Where a corpus comes from: a line-JSON file, a WikiSQL split, or generated
// template questions over the built-in tables.
struct DataSource {
  std::string data;
  std::string tables_dir;
  std::string wikisql_dir;
  std::string split = "train";
  size_t limit = 0;
  size_t synthetic = 0;
  uint64_t synthetic_seed = 1;

  void add_options(CLI::App* app, const std::string& prefix = "") {
    app->add_option("--" + prefix + "data", data, "Line-JSON corpus {question, table, sql}");
    app->add_option("--" + prefix + "tables", tables_dir, "Directory with the corpus tables (default: built-in)");
    app->add_option("--" + prefix + "wikisql", wikisql_dir, "Directory in the WikiSQL release layout");
    app->add_option("--" + prefix + "split", split, "WikiSQL split name")->capture_default_str();
    app->add_option("--" + prefix + "limit", limit, "Read at most this many WikiSQL records");
    app->add_option("--" + prefix + "synthetic", synthetic, "Generate this many template questions");
    app->add_option("--" + prefix + "synthetic-seed", synthetic_seed, "Seed for generated questions")
        ->capture_default_str();
  }
  bool given() const { return !data.empty() || !wikisql_dir.empty() || synthetic > 0; }

  Corpus load(const Vocabulary& vocab) const {
    Corpus c;
    if (!data.empty()) {
      c = load_corpus(data, tables_dir, vocab);
    } else if (!wikisql_dir.empty()) {
      c = load_wikisql(wikisql_dir, split, vocab, limit);
    } else if (synthetic > 0) {
      SyntheticOptions so;
      so.seed = synthetic_seed;
      c = generate_synthetic(builtin_tables(vocab), synthetic, vocab, so);
    } else {
      throw ValidationError("no data: give --data, --wikisql or --synthetic");
    }
    if (c.skipped > 0) {
      std::cerr << "skipped " << c.skipped << " records";
      if (!c.warnings.empty()) std::cerr << " (first: " << c.warnings.front() << ")";
      std::cerr << "\n";
    }
    return c;
  }
};

struct TrainOptions {
  std::string scorer = "sparse";
  std::string mode = "bidirectional";
  std::string granularity = "predicate";
  int epochs = 15;
  int batch_size = 8;
  double lr = 0.001;
  double margin = 0.5;
  size_t max_negatives = LossConfig{}.max_negatives;
  bool per_pair_hinge = false;
  uint64_t seed = 1;

  void add_options(CLI::App* app) {
    app->add_option("--scorer", scorer, "sparse or neural")->capture_default_str();
    app->add_option("--mode", mode, "Surface mode: inside, left, right, bidirectional")->capture_default_str();
    app->add_option("--granularity", granularity, "Rule features: predicate or rule")->capture_default_str();
    app->add_option("--epochs", epochs)->capture_default_str();
    app->add_option("--batch-size", batch_size)->capture_default_str();
    app->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    app->add_option("--margin", margin)->capture_default_str();
    app->add_option("--max-negatives", max_negatives, "Top-scoring negatives kept per example; 0 keeps all")
        ->capture_default_str();
    app->add_flag("--per-pair-hinge", per_pair_hinge, "Hinge on every positive/negative pair");
    app->add_option("--seed", seed)->capture_default_str();
  }

  ModelKind kind() const {
    if (scorer == "sparse") return ModelKind::kSparse;
    if (scorer == "neural") return ModelKind::kNeural;
    throw ValidationError("unknown scorer " + scorer);
  }
  ModelConfig model_config() const {
    ModelConfig c;
    const auto m = parse_surface_mode(mode);
    if (!m) throw ValidationError("unknown surface mode " + mode);
    const auto g = parse_granularity(granularity);
    if (!g) throw ValidationError("unknown granularity " + granularity);
    c.mode = *m;
    c.granularity = *g;
    return c;
  }
  TrainerConfig trainer() const {
    TrainerConfig t;
    t.loss.margin = margin;
    t.loss.per_pair_hinge = per_pair_hinge;
    t.loss.max_negatives = max_negatives;
    t.learning_rate = lr;
    t.epochs = epochs;
    t.batch_size = batch_size;
    t.seed = seed;
    return t;
  }
};

void print_abstraction(const std::string& question, const TableContext& ctx, const Vocabulary& vocab) {
  const auto anns = annotate(question, *ctx.index, vocab, ctx.synonyms);
  std::cout << "annotations:\n";
  for (const auto& a : anns) {
    std::cout << "  [" << a.span.begin << "," << a.span.end << ") \"" << a.text << "\" -> " << a.symbol.signature()
              << " " << match_kind_name(a.match) << " " << a.score << "\n";
  }
  std::cout << "utterances:\n";
  for (const auto& u : permute(question, anns, vocab)) {
    std::cout << "  " << u.render() << "  (score " << u.annotation_score << ", unk " << u.unknown_count << ")\n";
  }
}

int cmd_parse(const std::string& question, const TableContext& ctx, const Vocabulary& vocab, const Scorer& scorer,
              bool all) {
  if (all) {
    for (const auto& u : abstract_question(question, *ctx.index, vocab, ctx.synonyms)) {
      std::cout << "# " << u.render() << "\n";
      try {
        const ParseAllResult r = parse_all(u);
        for (const auto& d : r.trees) {
          std::cout << d.serialize() << "\n    => ";
          try {
            std::cout << render_sql(interpret(d, *ctx.table), ctx.table->name()) << "\n";
          } catch (const InterpretationError& e) {
            std::cout << "interpretation error: " << e.what() << "\n";
          }
        }
        if (r.truncated) std::cout << "(truncated; " << r.total << " trees)\n";
      } catch (const ParseError& e) {
        std::cout << "  " << e.what() << "\n";
      }
    }
    return 0;
  }
  const Prediction p = predict(question, ctx, vocab, scorer);
  if (p.chosen >= 0) {
    std::cout << "utterance: " << p.utterances[p.chosen].render() << "\n";
    std::cout << "score: " << p.score << "\n" << p.derivation->pretty();
  }
  if (!p.ok()) {
    std::cerr << "error: " << p.error << "\n";
    return 1;
  }
  std::cout << "sql: " << render_sql(*p.sql, ctx.table->name()) << "\n";
  return 0;
}

json train_report_json(const TrainReport& r) {
  return {{"examples", r.examples},       {"trainable", r.trainable},
          {"unreachable", r.unreachable}, {"unparseable", r.unparseable},
          {"no_negatives", r.no_negatives}, {"avg_candidates", r.avg_candidates},
          {"best_epoch", r.best_epoch},   {"best_dev_acc_qm", r.best_dev_acc_qm}};
}

int cmd_train(const Common& common, const DataSource& src, const DataSource& dev_src, const TrainOptions& to,
              const std::string& out) {
  const Vocabulary vocab = load_vocab(common);
  const Corpus corpus = src.load(vocab);
  const ModelConfig mc = to.model_config();
  LabelOptions lo;
  lo.mode = mc.mode;
  lo.granularity = mc.granularity;
  const auto labeled = label_corpus(corpus, vocab, lo);
  std::vector<DevExample> dev;
  if (dev_src.given()) dev = dev_examples(dev_src.load(vocab));
  auto model = make_model(to.kind(), mc, vocab, to.seed);
  const TrainReport report = train(*model, labeled, dev, vocab, to.trainer(), [](const EpochStats& e) {
    json j = {{"epoch", e.epoch}, {"loss", e.loss}};
    if (e.dev_acc_qm >= 0) j["dev_acc_qm"] = e.dev_acc_qm;
    std::cout << j.dump() << std::endl;
  });
  model->save(out);
  json j = train_report_json(report);
  j["model"] = out;
  j["scorer"] = to.scorer;
  std::cout << json{{"report", j}}.dump() << std::endl;
  return 0;
}

int cmd_eval(const Common& common, const DataSource& src, int folds, const TrainOptions& to, bool records) {
  const Vocabulary vocab = load_vocab(common);
  const Corpus corpus = src.load(vocab);
  if (folds > 0) {
    CrossValidationOptions cv;
    cv.folds = folds;
    cv.seed = to.seed;
    cv.kind = to.kind();
    cv.model = to.model_config();
    cv.trainer = to.trainer();
    const auto report = cross_validate(corpus, vocab, cv, [](int f, const FoldResult& r) {
      std::cerr << "fold " << f + 1 << ": acc_qm " << r.eval.acc_qm << ", acc_ex " << r.eval.acc_ex << " ("
                << r.seconds << " s)\n";
    });
    std::cout << report.to_json().dump(2) << "\n";
    return 0;
  }
  auto model = maybe_model(common);
  UniformScorer uniform;
  const EvalReport r = evaluate(corpus, model ? static_cast<const Scorer&>(*model) : uniform, vocab);
  json j = r.to_json(records);
  j["scorer"] = model ? std::string(model_kind_name(model->kind())) : "uniform";
  std::cout << j.dump(2) << "\n";
  return 0;
}

// One question per line; ":table NAME" switches tables.
int cmd_repl(const Common& common, std::string table_ref) {
  const Vocabulary vocab = load_vocab(common);
  auto model = maybe_model(common);
  UniformScorer uniform;
  const Scorer& scorer = model ? static_cast<const Scorer&>(*model) : uniform;
  auto ctx = make_context(table_ref, load_table(table_ref), vocab);
  std::string line;
  std::cout << "table " << table_ref << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    const std::string text = normalize_text(line);
    if (text == ":quit" || text == ":q") break;
    try {
      if (text.starts_with(":table ")) {
        table_ref = text.substr(7);
        ctx = make_context(table_ref, load_table(table_ref), vocab);
      } else if (!text.empty()) {
        const Prediction p = predict(text, *ctx, vocab, scorer);
        if (!p.ok()) {
          std::cout << "no query: " << p.error << "\n";
        } else {
          std::cout << render_sql(*p.sql, ctx->table->name()) << "\n"
                    << result_to_csv(execute(*p.sql, *ctx->table));
        }
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
    std::cout << "table " << table_ref << "> " << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tablequery: natural-language questions to SQL over a single table"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--vocab", common.vocab_path, "Vocabulary file (default: built-in English)");
  app.add_option("--model", common.model_path, "Model file (default: $TQ_MODEL, else uniform scores)");

  std::string table_ref, question, sql_text;
  bool all = false, dump = false;

  auto* abstract = app.add_subcommand("abstract", "Show annotations and abstracted utterances");
  abstract->add_option("--table", table_ref, "CSV path or built-in table name")->required();
  abstract->add_option("question", question)->required();

  auto* rules = app.add_subcommand("rules", "Print the deduction rules");
  rules->add_flag("--dump", dump, "Print the full rule table");

  auto* parse = app.add_subcommand("parse", "Parse a question and print the derivation and SQL");
  parse->add_option("--table", table_ref, "CSV path or built-in table name")->required();
  parse->add_flag("--all", all, "Enumerate every derivation with its SQL");
  parse->add_option("question", question)->required();

  auto* exec = app.add_subcommand("exec", "Execute SQL on a table and print CSV");
  exec->add_option("--table", table_ref, "CSV path or built-in table name")->required();
  exec->add_option("--sql", sql_text, "Query text")->required();

  DataSource data, dev_data;
  TrainOptions topts;
  std::string out;
  auto* train_cmd = app.add_subcommand("train", "Train a scorer; prints one JSON line per epoch and a report");
  data.add_options(train_cmd);
  dev_data.add_options(train_cmd, "dev-");
  topts.add_options(train_cmd);
  train_cmd->add_option("--out", out, "Model file to write")->required();

  int folds = 0;
  bool records = false;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the model, or cross-validate with --folds");
  data.add_options(eval_cmd);
  topts.add_options(eval_cmd);
  eval_cmd->add_option("--folds", folds, "Train and test in k folds instead of using --model");
  eval_cmd->add_flag("--records", records, "Include per-question records");

  auto* gen = app.add_subcommand("gen", "Generate corpora");
  gen->require_subcommand(1);
  size_t n = 500;
  uint64_t gen_seed = 1;
  double typo_rate = 0.1;
  auto* gen_syn = gen->add_subcommand("synthetic", "Template questions over the built-in tables (line-JSON)");
  gen_syn->add_option("--n", n)->capture_default_str();
  gen_syn->add_option("--seed", gen_seed)->capture_default_str();
  gen_syn->add_option("--typo-rate", typo_rate)->capture_default_str();
  gen_syn->add_option("--out", out, "Output file (default: stdout)");
  std::string dir;
  size_t n_train = 2000, n_dev = 500, n_test = 500;
  auto* gen_wiki = gen->add_subcommand("wikisql", "A generated slice in the WikiSQL release layout");
  gen_wiki->add_option("--dir", dir)->required();
  gen_wiki->add_option("--seed", gen_seed)->capture_default_str();
  gen_wiki->add_option("--train", n_train)->capture_default_str();
  gen_wiki->add_option("--dev", n_dev)->capture_default_str();
  gen_wiki->add_option("--test", n_test)->capture_default_str();

  ServiceOptions sopts;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", sopts.host)->capture_default_str();
  serve->add_option("--port", sopts.port)->capture_default_str();
  serve->add_option("--ui", sopts.ui_dir, "Directory served under /ui");
  serve->add_option("--tables-dir", sopts.tables_dir, "Directory where uploaded tables are kept");
  serve->add_flag("--builtin-tables", sopts.builtin_tables, "Preload the shipped toy tables");
  serve->add_option("--max-upload", sopts.max_upload_bytes, "Largest accepted CSV upload in bytes")
      ->capture_default_str();

  auto* repl = app.add_subcommand("repl", "Interactive questions against one table");
  table_ref = "car_sales";
  repl->add_option("--table", table_ref, "CSV path or built-in table name")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rules) {
      std::cout << dump_rules();
      return 0;
    }
    if (*exec) {
      auto table = load_table(table_ref);
      const SqlQuery q = bind_to_table(parse_sql(sql_text), *table);
      std::cout << result_to_csv(execute(q, *table));
      return 0;
    }
    if (*train_cmd) return cmd_train(common, data, dev_data, topts, out);
    if (*eval_cmd) return cmd_eval(common, data, folds, topts, records);
    if (*gen_syn) {
      const Vocabulary vocab = load_vocab(common);
      SyntheticOptions so;
      so.seed = gen_seed;
      so.typo_rate = typo_rate;
      const Corpus c = generate_synthetic(builtin_tables(vocab), n, vocab, so);
      if (out.empty()) {
        write_corpus(c, std::cout);
      } else {
        std::ofstream f(out);
        write_corpus(c, f);
      }
      return 0;
    }
    if (*gen_wiki) {
      const auto stats = write_wikisql_slice(dir, gen_seed, {{"train", n_train}, {"dev", n_dev}, {"test", n_test}});
      std::cout << json{{"tables", stats.tables}, {"questions", stats.questions}}.dump() << "\n";
      return 0;
    }
    const Vocabulary vocab = load_vocab(common);
    if (*serve) {
      auto model = maybe_model(common);
      std::shared_ptr<const Scorer> scorer;
      if (model) {
        scorer = std::shared_ptr<const Scorer>(std::move(model));
      } else {
        scorer = std::make_shared<UniformScorer>();
      }
      return run_service(vocab, scorer, sopts);
    }
    if (*repl) return cmd_repl(common, table_ref);
    auto ctx = make_context(table_ref, load_table(table_ref), vocab);
    if (*abstract) {
      print_abstraction(question, *ctx, vocab);
      return 0;
    }
    if (*parse) {
      auto model = maybe_model(common);
      UniformScorer uniform;
      return cmd_parse(question, *ctx, vocab, model ? static_cast<const Scorer&>(*model) : uniform, all);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
