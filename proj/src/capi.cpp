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
#include "tcgat/tcgat.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "tcgat/error.hpp"
#include "tcgat/gradcheck.hpp"
#include "tcgat/train.hpp"

struct tcgat_corpus {
  std::vector<tcgat::AnnotatedSentence> sentences;
};
struct tcgat_kg {
  tcgat::CausalKG kg;
};
struct tcgat_config {
  tcgat::TrainConfig config;
};
struct tcgat_embeddings {
  tcgat::EmbeddingTable table;
};
struct tcgat_model {
  tcgat::Model model;
};
struct tcgat_report {
  tcgat::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

tcgat_status status_of(tcgat::ErrorKind kind) {
  switch (kind) {
    case tcgat::ErrorKind::kValidation: return TCGAT_ERR_VALIDATION;
    case tcgat::ErrorKind::kNumerical: return TCGAT_ERR_NUMERICAL;
    case tcgat::ErrorKind::kIo: return TCGAT_ERR_IO;
    case tcgat::ErrorKind::kArgument: return TCGAT_ERR_ARGUMENT;
  }
  return TCGAT_ERR_INTERNAL;
}

tcgat_status set_error(tcgat_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
tcgat_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return TCGAT_OK;
  } catch (const tcgat::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TCGAT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TCGAT_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(TCGAT_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) tcgat::fail(tcgat::ErrorKind::kArgument, what);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::size_t max_len_or_default(std::size_t max_len) { return max_len ? max_len : tcgat::kDefaultMaxLen; }

const tcgat::EmbeddingTable* table_of(const tcgat_embeddings* e) { return e ? &e->table : nullptr; }

std::string file_stem_for(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

extern "C" {

const char* tcgat_version(void) { return "0.1.0"; }

const char* tcgat_last_error(void) { return g_last_error.c_str(); }

void tcgat_string_free(char* s) { std::free(s); }

tcgat_status tcgat_corpus_load(const char* path, size_t max_len, tcgat_corpus** out) {
  return guarded([&] {
    require(path && out, "tcgat_corpus_load: null argument");
    *out = new tcgat_corpus{tcgat::parse_corpus(std::filesystem::path(path), max_len_or_default(max_len))};
  });
}

tcgat_status tcgat_corpus_parse(const char* jsonl, size_t max_len, tcgat_corpus** out) {
  return guarded([&] {
    require(jsonl && out, "tcgat_corpus_parse: null argument");
    std::istringstream in{std::string(jsonl)};
    *out = new tcgat_corpus{tcgat::parse_corpus(in, max_len_or_default(max_len))};
  });
}

tcgat_status tcgat_corpus_save(const tcgat_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus && path, "tcgat_corpus_save: null argument");
    tcgat::write_corpus(std::filesystem::path(path), corpus->sentences);
  });
}

tcgat_status tcgat_corpus_synthesize(size_t n, uint64_t seed, const char* templates_json, tcgat_corpus** out) {
  return guarded([&] {
    require(out != nullptr, "tcgat_corpus_synthesize: null argument");
    const auto templates =
        templates_json ? tcgat::SynthTemplates::from_json(templates_json) : tcgat::SynthTemplates::defaults();
    *out = new tcgat_corpus{tcgat::generate_synthetic(n, seed, templates)};
  });
}

tcgat_status tcgat_corpus_split(const tcgat_corpus* corpus, double train_fraction, uint64_t seed,
                                tcgat_corpus** train, tcgat_corpus** test) {
  return guarded([&] {
    require(corpus && train && test, "tcgat_corpus_split: null argument");
    auto split = tcgat::split_corpus(corpus->sentences, train_fraction, seed);
    auto tr = std::make_unique<tcgat_corpus>(tcgat_corpus{std::move(split.train)});
    auto te = std::make_unique<tcgat_corpus>(tcgat_corpus{std::move(split.test)});
    *train = tr.release();
    *test = te.release();
  });
}

tcgat_status tcgat_corpus_stats_json(const tcgat_corpus* corpus, char** out_json) {
  return guarded([&] {
    require(corpus && out_json, "tcgat_corpus_stats_json: null argument");
    *out_json = dup_string(tcgat::stats_to_json(tcgat::corpus_stats(corpus->sentences)));
  });
}

size_t tcgat_corpus_size(const tcgat_corpus* corpus) { return corpus ? corpus->sentences.size() : 0; }

void tcgat_corpus_free(tcgat_corpus* corpus) { delete corpus; }

tcgat_status tcgat_kg_build(const tcgat_corpus* train, tcgat_kg** out) {
  return guarded([&] {
    require(train && out, "tcgat_kg_build: null argument");
    *out = new tcgat_kg{tcgat::build_causal_kg(train->sentences)};
  });
}

tcgat_status tcgat_kg_load(const char* path, tcgat_kg** out) {
  return guarded([&] {
    require(path && out, "tcgat_kg_load: null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) tcgat::fail(tcgat::ErrorKind::kIo, std::string("cannot open ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    *out = new tcgat_kg{tcgat::CausalKG::from_json(text.str())};
  });
}

tcgat_status tcgat_kg_save(const tcgat_kg* kg, const char* path) {
  return guarded([&] {
    require(kg && path, "tcgat_kg_save: null argument");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) tcgat::fail(tcgat::ErrorKind::kIo, std::string("cannot write ") + path);
    out << kg->kg.to_json() << '\n';
    if (!out) tcgat::fail(tcgat::ErrorKind::kIo, std::string("write failed: ") + path);
  });
}

tcgat_status tcgat_kg_to_json(const tcgat_kg* kg, char** out_json) {
  return guarded([&] {
    require(kg && out_json, "tcgat_kg_to_json: null argument");
    *out_json = dup_string(kg->kg.to_json());
  });
}

size_t tcgat_kg_node_count(const tcgat_kg* kg) { return kg ? kg->kg.node_count() : 0; }
size_t tcgat_kg_edge_count(const tcgat_kg* kg) { return kg ? kg->kg.edge_count() : 0; }
void tcgat_kg_free(tcgat_kg* kg) { delete kg; }

tcgat_status tcgat_export_matrices(const tcgat_corpus* corpus, const tcgat_kg* kg, const char* out_dir,
                                   size_t* written) {
  return guarded([&] {
    require(corpus && out_dir, "tcgat_export_matrices: null argument");
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) tcgat::fail(tcgat::ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
    const auto own = kg ? tcgat::CausalKG{} : tcgat::build_causal_kg(corpus->sentences);
    const auto& graph = kg ? kg->kg : own;
    std::set<std::string> used;
    std::size_t count = 0;
    for (std::size_t k = 0; k < corpus->sentences.size(); ++k) {
      const auto& s = corpus->sentences[k];
      auto stem = file_stem_for(s.id);
      if (!used.insert(stem).second) {
        stem += "-" + std::to_string(k);
        used.insert(stem);
      }
      const auto path = dir / (stem + ".json");
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) tcgat::fail(tcgat::ErrorKind::kIo, "cannot write " + path.string());
      out << tcgat::matrices_to_json(s, tcgat::build_time_matrices(s), tcgat::sentence_causal_adj(graph, s)) << '\n';
      if (!out) tcgat::fail(tcgat::ErrorKind::kIo, "write failed: " + path.string());
      ++count;
    }
    if (written) *written = count;
  });
}

tcgat_status tcgat_config_create(tcgat_config** out) {
  return guarded([&] {
    require(out != nullptr, "tcgat_config_create: null argument");
    *out = new tcgat_config{};
  });
}

tcgat_status tcgat_config_load(const char* path, tcgat_config** out) {
  return guarded([&] {
    require(path && out, "tcgat_config_load: null argument");
    *out = new tcgat_config{tcgat::TrainConfig::load(path)};
  });
}

tcgat_status tcgat_config_parse(const char* text, tcgat_config** out) {
  return guarded([&] {
    require(text && out, "tcgat_config_parse: null argument");
    *out = new tcgat_config{tcgat::TrainConfig::parse(text)};
  });
}

tcgat_status tcgat_config_set(tcgat_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "tcgat_config_set: null argument");
    auto next = config->config;
    next.set(key, value);
    next.validate();
    config->config = next;
  });
}

tcgat_status tcgat_config_get(const tcgat_config* config, const char* key, char** out_value) {
  return guarded([&] {
    require(config && key && out_value, "tcgat_config_get: null argument");
    const auto map = config->config.to_map();
    const auto it = map.find(key);
    if (it == map.end()) tcgat::fail(tcgat::ErrorKind::kValidation, std::string("unknown config key: ") + key);
    *out_value = dup_string(it->second);
  });
}

void tcgat_config_free(tcgat_config* config) { delete config; }

tcgat_status tcgat_embeddings_load(const char* path, tcgat_embeddings** out) {
  return guarded([&] {
    require(path && out, "tcgat_embeddings_load: null argument");
    *out = new tcgat_embeddings{tcgat::EmbeddingTable::load(path)};
  });
}

size_t tcgat_embeddings_dim(const tcgat_embeddings* e) { return e ? e->table.dim() : 0; }
size_t tcgat_embeddings_count(const tcgat_embeddings* e) { return e ? e->table.size() : 0; }
void tcgat_embeddings_free(tcgat_embeddings* e) { delete e; }

tcgat_status tcgat_train(const tcgat_config* config, const tcgat_corpus* train, const tcgat_embeddings* embeddings,
                         tcgat_epoch_callback on_epoch, void* user, tcgat_model** out) {
  return guarded([&] {
    require(config && train && out, "tcgat_train: null argument");
    tcgat::EpochCallback cb;
    if (on_epoch) cb = [on_epoch, user](std::size_t epoch, double loss) { on_epoch(epoch, loss, user); };
    *out = new tcgat_model{tcgat::train(config->config, train->sentences, table_of(embeddings), cb)};
  });
}

tcgat_status tcgat_model_save(const tcgat_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "tcgat_model_save: null argument");
    model->model.save(path);
  });
}

tcgat_status tcgat_model_load(const char* path, tcgat_model** out) {
  return guarded([&] {
    require(path && out, "tcgat_model_load: null argument");
    *out = new tcgat_model{tcgat::Model::load(path)};
  });
}

size_t tcgat_model_epochs(const tcgat_model* model) { return model ? model->model.loss_curve.size() : 0; }

double tcgat_model_epoch_loss(const tcgat_model* model, size_t epoch) {
  if (!model || epoch >= model->model.loss_curve.size()) return 0.0;
  return model->model.loss_curve[epoch];
}

void tcgat_model_free(tcgat_model* model) { delete model; }

tcgat_status tcgat_evaluate(const tcgat_model* model, const tcgat_corpus* test, const tcgat_embeddings* embeddings,
                            tcgat_report** out) {
  return guarded([&] {
    require(model && test && out, "tcgat_evaluate: null argument");
    *out = new tcgat_report{tcgat::evaluate(model->model, test->sentences, table_of(embeddings))};
  });
}

tcgat_status tcgat_report_json(const tcgat_report* report, char** out_json) {
  return guarded([&] {
    require(report && out_json, "tcgat_report_json: null argument");
    *out_json = dup_string(report->report.to_json());
  });
}

tcgat_status tcgat_report_table(const tcgat_report* report, char** out_table) {
  return guarded([&] {
    require(report && out_table, "tcgat_report_table: null argument");
    *out_table = dup_string(report->report.to_table());
  });
}

double tcgat_report_macro_f1(const tcgat_report* report) { return report ? report->report.macro_f1 : 0.0; }

void tcgat_report_free(tcgat_report* report) { delete report; }

tcgat_status tcgat_ablate(const tcgat_config* config, const tcgat_corpus* corpus, const tcgat_embeddings* embeddings,
                          char** out_table, char** out_json) {
  return guarded([&] {
    require(config && corpus, "tcgat_ablate: null argument");
    const auto result = tcgat::run_ablation(config->config, corpus->sentences, table_of(embeddings));
    char* table = out_table ? dup_string(result.to_table()) : nullptr;
    try {
      if (out_json) *out_json = dup_string(result.to_json());
    } catch (...) {
      std::free(table);
      throw;
    }
    if (out_table) *out_table = table;
  });
}

tcgat_status tcgat_gradcheck(uint64_t seed, char** out_report, double* out_max_rel_error) {
  bool passed = false;
  const auto status = guarded([&] {
    const auto suite = tcgat::run_grad_check_suite(seed);
    passed = suite.passed();
    if (out_max_rel_error) *out_max_rel_error = suite.max_rel_error();
    if (out_report) *out_report = dup_string(suite.to_text());
  });
  if (status != TCGAT_OK) return status;
  if (!passed) return set_error(TCGAT_ERR_NUMERICAL, "gradient check exceeded tolerance");
  return TCGAT_OK;
}

}  // extern "C"
