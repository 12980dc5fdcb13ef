//==============================================================================
// Copyright (c) 2026 The tcgat Authors.
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
//==============================================================================
// Command-line front end. Talks to the library exclusively through tcgat.h.
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tcgat/tcgat.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Corpus = std::unique_ptr<tcgat_corpus, Deleter<tcgat_corpus, tcgat_corpus_free>>;
using Kg = std::unique_ptr<tcgat_kg, Deleter<tcgat_kg, tcgat_kg_free>>;
using Config = std::unique_ptr<tcgat_config, Deleter<tcgat_config, tcgat_config_free>>;
using Embeddings = std::unique_ptr<tcgat_embeddings, Deleter<tcgat_embeddings, tcgat_embeddings_free>>;
using ModelHandle = std::unique_ptr<tcgat_model, Deleter<tcgat_model, tcgat_model_free>>;
using Report = std::unique_ptr<tcgat_report, Deleter<tcgat_report, tcgat_report_free>>;
using CString = std::unique_ptr<char, Deleter<char, tcgat_string_free>>;

// Thrown to unwind out of a subcommand with the status already reported.
struct Failed {
  int code;
};

int exit_code(tcgat_status s) {
  switch (s) {
    case TCGAT_OK: return kExitOk;
    case TCGAT_ERR_NUMERICAL: return kExitNumerical;
    default: return kExitValidation;
  }
}

const char* status_label(tcgat_status s) {
  switch (s) {
    case TCGAT_ERR_VALIDATION: return "validation error";
    case TCGAT_ERR_NUMERICAL: return "numerical failure";
    case TCGAT_ERR_IO: return "i/o error";
    case TCGAT_ERR_ARGUMENT: return "invalid argument";
    default: return "internal error";
  }
}

void check(tcgat_status s) {
  if (s == TCGAT_OK) return;
  std::fprintf(stderr, "tcgat: %s: %s\n", status_label(s), tcgat_last_error());
  throw Failed{exit_code(s)};
}

void write_text(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (text[0] && text[std::char_traits<char>::length(text) - 1] != '\n') out << '\n';
  if (!out) {
    std::fprintf(stderr, "tcgat: i/o error: cannot write %s\n", path.c_str());
    throw Failed{kExitValidation};
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "tcgat: i/o error: cannot open %s\n", path.c_str());
    throw Failed{kExitValidation};
  }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Corpus load_corpus(const std::string& path, std::size_t max_len) {
  tcgat_corpus* c = nullptr;
  check(tcgat_corpus_load(path.c_str(), max_len, &c));
  return Corpus(c);
}

Config load_config(const std::string& path) {
  tcgat_config* c = nullptr;
  check(path.empty() ? tcgat_config_create(&c) : tcgat_config_load(path.c_str(), &c));
  return Config(c);
}

Embeddings load_embeddings(const std::string& path) {
  if (path.empty()) return nullptr;
  tcgat_embeddings* e = nullptr;
  check(tcgat_embeddings_load(path.c_str(), &e));
  return Embeddings(e);
}

std::size_t config_max_len(const tcgat_config* cfg) {
  char* v = nullptr;
  check(tcgat_config_get(cfg, "max_len", &v));
  CString owned(v);
  return std::stoul(owned.get());
}

void print_epoch(std::size_t epoch, double loss, void*) {
  std::fprintf(stderr, "epoch %3zu  loss %.6f\n", epoch + 1, loss);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-causal graph attention tagger"};
  app.require_subcommand(1);

  std::size_t max_len = 0;
  std::string path;

  auto* validate = app.add_subcommand("validate", "Parse and validate an annotated JSONL corpus");
  validate->add_option("path", path, "Corpus file")->required();
  validate->add_option("--max-len", max_len, "Maximum sentence length (default 50)");

  auto* stats = app.add_subcommand("stats", "Print corpus statistics as JSON");
  stats->add_option("path", path, "Corpus file")->required();
  stats->add_option("--max-len", max_len, "Maximum sentence length (default 50)");

  std::size_t synth_n = 0;
  std::uint64_t seed = 0;
  std::string out, templates;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--n", synth_n, "Number of sentences")->required();
  synth->add_option("--seed", seed, "Generator seed")->required();
  synth->add_option("--out", out, "Output JSONL path")->required();
  synth->add_option("--templates", templates, "Template configuration (JSON)");

  std::string train_path;
  auto* build_kg = app.add_subcommand("build-kg", "Build the causal knowledge graph from a training split");
  build_kg->add_option("--train", train_path, "Training corpus")->required();
  build_kg->add_option("--out", out, "Output JSON path")->required();

  std::string corpus_path, kg_path;
  auto* export_m = app.add_subcommand("export-matrices", "Write per-sentence time-state and KG matrices as JSON");
  export_m->add_option("--corpus", corpus_path, "Corpus file")->required();
  export_m->add_option("--out", out, "Output directory")->required();
  export_m->add_option("--kg", kg_path, "Knowledge graph JSON (default: built from the corpus)");

  std::string config_path, embeddings_path;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", config_path, "Configuration file")->required();
  train->add_option("--train", train_path, "Training corpus")->required();
  train->add_option("--embeddings", embeddings_path, "Contextual embeddings (TCEMB1)");
  train->add_option("--out", out, "Checkpoint path")->required();

  std::string ckpt, test_path, report_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a test corpus");
  eval->add_option("--ckpt", ckpt, "Checkpoint path")->required();
  eval->add_option("--test", test_path, "Test corpus")->required();
  eval->add_option("--embeddings", embeddings_path, "Contextual embeddings (TCEMB1)");
  eval->add_option("--report", report_path, "JSON report path (default: <ckpt>.eval.json)");

  auto* ablate = app.add_subcommand("ablate", "Train and evaluate every model variant");
  ablate->add_option("--config", config_path, "Configuration file")->required();
  ablate->add_option("--corpus", corpus_path, "Corpus to split into train and test")->required();
  ablate->add_option("--embeddings", embeddings_path, "Contextual embeddings (TCEMB1)");
  ablate->add_option("--report", report_path, "JSON report path");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  gradcheck->add_option("--seed", seed, "Input seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*validate) {
      auto c = load_corpus(path, max_len);
      std::printf("ok: %zu sentences\n", tcgat_corpus_size(c.get()));
    } else if (*stats) {
      auto c = load_corpus(path, max_len);
      char* json = nullptr;
      check(tcgat_corpus_stats_json(c.get(), &json));
      CString owned(json);
      std::printf("%s\n", owned.get());
    } else if (*synth) {
      tcgat_corpus* c = nullptr;
      const std::string t = templates.empty() ? std::string() : read_text(templates);
      check(tcgat_corpus_synthesize(synth_n, seed, templates.empty() ? nullptr : t.c_str(), &c));
      Corpus owned(c);
      check(tcgat_corpus_save(owned.get(), out.c_str()));
      std::printf("wrote %zu sentences to %s\n", tcgat_corpus_size(owned.get()), out.c_str());
    } else if (*build_kg) {
      auto c = load_corpus(train_path, 0);
      tcgat_kg* kg = nullptr;
      check(tcgat_kg_build(c.get(), &kg));
      Kg owned(kg);
      check(tcgat_kg_save(owned.get(), out.c_str()));
      std::printf("%zu nodes, %zu edges -> %s\n", tcgat_kg_node_count(owned.get()), tcgat_kg_edge_count(owned.get()),
                  out.c_str());
    } else if (*export_m) {
      auto c = load_corpus(corpus_path, 0);
      Kg kg;
      if (!kg_path.empty()) {
        tcgat_kg* k = nullptr;
        check(tcgat_kg_load(kg_path.c_str(), &k));
        kg.reset(k);
      }
      std::size_t written = 0;
      check(tcgat_export_matrices(c.get(), kg.get(), out.c_str(), &written));
      std::printf("wrote %zu matrix files to %s\n", written, out.c_str());
    } else if (*train) {
      auto cfg = load_config(config_path);
      auto c = load_corpus(train_path, config_max_len(cfg.get()));
      auto emb = load_embeddings(embeddings_path);
      tcgat_model* m = nullptr;
      check(tcgat_train(cfg.get(), c.get(), emb.get(), print_epoch, nullptr, &m));
      ModelHandle model(m);
      check(tcgat_model_save(model.get(), out.c_str()));
      std::printf("trained %zu epochs, final loss %.6f -> %s\n", tcgat_model_epochs(model.get()),
                  tcgat_model_epoch_loss(model.get(), tcgat_model_epochs(model.get()) - 1), out.c_str());
    } else if (*eval) {
      tcgat_model* m = nullptr;
      check(tcgat_model_load(ckpt.c_str(), &m));
      ModelHandle model(m);
      auto c = load_corpus(test_path, 0);
      auto emb = load_embeddings(embeddings_path);
      tcgat_report* r = nullptr;
      check(tcgat_evaluate(model.get(), c.get(), emb.get(), &r));
      Report report(r);
      char* table = nullptr;
      char* json = nullptr;
      check(tcgat_report_table(report.get(), &table));
      CString owned_table(table);
      check(tcgat_report_json(report.get(), &json));
      CString owned_json(json);
      std::fputs(owned_table.get(), stdout);
      const auto dest = report_path.empty() ? ckpt + ".eval.json" : report_path;
      write_text(dest, owned_json.get());
      std::printf("report -> %s\n", dest.c_str());
    } else if (*ablate) {
      auto cfg = load_config(config_path);
      auto c = load_corpus(corpus_path, config_max_len(cfg.get()));
      auto emb = load_embeddings(embeddings_path);
      char* table = nullptr;
      char* json = nullptr;
      check(tcgat_ablate(cfg.get(), c.get(), emb.get(), &table, &json));
      CString owned_table(table), owned_json(json);
      std::fputs(owned_table.get(), stdout);
      if (!report_path.empty()) {
        write_text(report_path, owned_json.get());
        std::printf("report -> %s\n", report_path.c_str());
      }
    } else if (*gradcheck) {
      char* text = nullptr;
      double worst = 0.0;
      const auto s = tcgat_gradcheck(seed, &text, &worst);
      CString owned(text);
      if (owned) std::fputs(owned.get(), stdout);
      check(s);
    }
  } catch (const Failed& f) {
    return f.code;
  }
  return kExitOk;
}
