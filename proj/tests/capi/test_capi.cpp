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
// Exercises the shared library strictly through tcgat.h.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "tcgat/tcgat.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  tcgat_string_free(s);
  return out;
}

tcgat_config* small_config() {
  tcgat_config* c = nullptr;
  REQUIRE(tcgat_config_create(&c) == TCGAT_OK);
  for (auto [k, v] : {std::pair{"embed.dim", "12"}, {"bilstm.hidden", "6"}, {"tgat.dim", "4"}, {"tgat.heads", "2"},
                      {"cgat.dim", "4"}, {"cgat.heads", "1"}, {"fuse.dim", "8"}, {"epochs", "3"},
                      {"batch_size", "8"}, {"lr", "0.005"}}) {
    REQUIRE(tcgat_config_set(c, k, v) == TCGAT_OK);
  }
  return c;
}

fs::path scratch(const char* name) {
  auto dir = fs::temp_directory_path() / "tcgat_capi_test";
  fs::create_directories(dir);
  return dir / name;
}

void count_epochs(size_t, double, void* user) { ++*static_cast<int*>(user); }

}  // namespace

TEST_CASE("version and empty error state") {
  CHECK(std::string(tcgat_version()).size() > 0);
  tcgat_config* c = nullptr;
  REQUIRE(tcgat_config_create(&c) == TCGAT_OK);
  CHECK(std::string(tcgat_last_error()).empty());
  tcgat_config_free(c);
}

TEST_CASE("null arguments are rejected") {
  CHECK(tcgat_corpus_load(nullptr, 0, nullptr) == TCGAT_ERR_ARGUMENT);
  CHECK(std::string(tcgat_last_error()).find("null") != std::string::npos);
  CHECK(tcgat_corpus_size(nullptr) == 0);
  tcgat_corpus_free(nullptr);
  tcgat_string_free(nullptr);
}

TEST_CASE("corpus lifecycle") {
  tcgat_corpus* c = nullptr;
  REQUIRE(tcgat_corpus_synthesize(30, 7, nullptr, &c) == TCGAT_OK);
  CHECK(tcgat_corpus_size(c) == 30);
  const auto path = scratch("corpus.jsonl");
  REQUIRE(tcgat_corpus_save(c, path.c_str()) == TCGAT_OK);
  tcgat_corpus* back = nullptr;
  REQUIRE(tcgat_corpus_load(path.c_str(), 0, &back) == TCGAT_OK);
  CHECK(tcgat_corpus_size(back) == 30);
  char* stats = nullptr;
  REQUIRE(tcgat_corpus_stats_json(back, &stats) == TCGAT_OK);
  CHECK(take(stats).find("\"sentence_count\": 30") != std::string::npos);
  tcgat_corpus *train = nullptr, *test = nullptr;
  REQUIRE(tcgat_corpus_split(back, 2.0 / 3.0, 1, &train, &test) == TCGAT_OK);
  CHECK(tcgat_corpus_size(train) == 20);
  CHECK(tcgat_corpus_size(test) == 10);
  for (auto* p : {c, back, train, test}) tcgat_corpus_free(p);
}

TEST_CASE("error codes") {
  tcgat_corpus* c = nullptr;
  CHECK(tcgat_corpus_load("/nonexistent/file.jsonl", 0, &c) == TCGAT_ERR_IO);
  CHECK(c == nullptr);
  CHECK(tcgat_corpus_parse(R"({"id":"a","tokens":["x","y"],"causal_tags":["O","O"],"temporal":[[0,1,"B"],[1,0,"B"]]})",
                           0, &c) == TCGAT_ERR_VALIDATION);
  CHECK(std::string(tcgat_last_error()).find("contradictory relations") != std::string::npos);
  CHECK(tcgat_corpus_synthesize(5, 1, "{\"plain_fraction\": 2}", &c) == TCGAT_ERR_VALIDATION);

  tcgat_config* cfg = nullptr;
  REQUIRE(tcgat_config_create(&cfg) == TCGAT_OK);
  CHECK(tcgat_config_set(cfg, "nope", "1") == TCGAT_ERR_VALIDATION);
  CHECK(tcgat_config_set(cfg, "epochs", "0") == TCGAT_ERR_VALIDATION);
  char* v = nullptr;
  REQUIRE(tcgat_config_get(cfg, "epochs", &v) == TCGAT_OK);
  CHECK(take(v) == "30");  // a rejected update leaves the config unchanged
  tcgat_config_free(cfg);

  tcgat_embeddings* e = nullptr;
  CHECK(tcgat_embeddings_load("/nonexistent.tcemb", &e) == TCGAT_ERR_IO);
}

TEST_CASE("knowledge graph and matrix export") {
  tcgat_corpus* c = nullptr;
  REQUIRE(tcgat_corpus_synthesize(25, 3, nullptr, &c) == TCGAT_OK);
  tcgat_kg* kg = nullptr;
  REQUIRE(tcgat_kg_build(c, &kg) == TCGAT_OK);
  CHECK(tcgat_kg_edge_count(kg) > 0);
  const auto kg_path = scratch("kg.json");
  REQUIRE(tcgat_kg_save(kg, kg_path.c_str()) == TCGAT_OK);
  tcgat_kg* back = nullptr;
  REQUIRE(tcgat_kg_load(kg_path.c_str(), &back) == TCGAT_OK);
  CHECK(tcgat_kg_node_count(back) == tcgat_kg_node_count(kg));
  CHECK(tcgat_kg_edge_count(back) == tcgat_kg_edge_count(kg));
  const auto dir = scratch("matrices");
  fs::remove_all(dir);
  size_t written = 0;
  REQUIRE(tcgat_export_matrices(c, back, dir.c_str(), &written) == TCGAT_OK);
  CHECK(written == 25);
  CHECK(fs::exists(dir / "syn-000000.json"));
  tcgat_kg_free(kg);
  tcgat_kg_free(back);
  tcgat_corpus_free(c);
}

TEST_CASE("train, save, load, evaluate") {
  tcgat_corpus* c = nullptr;
  REQUIRE(tcgat_corpus_synthesize(30, 5, nullptr, &c) == TCGAT_OK);
  auto* cfg = small_config();
  int epochs = 0;
  tcgat_model* m = nullptr;
  REQUIRE(tcgat_train(cfg, c, nullptr, count_epochs, &epochs, &m) == TCGAT_OK);
  CHECK(epochs == 3);
  CHECK(tcgat_model_epochs(m) == 3);
  CHECK(tcgat_model_epoch_loss(m, 2) > 0.0);
  const auto path = scratch("model.ckpt");
  REQUIRE(tcgat_model_save(m, path.c_str()) == TCGAT_OK);
  tcgat_model* back = nullptr;
  REQUIRE(tcgat_model_load(path.c_str(), &back) == TCGAT_OK);
  tcgat_report *r1 = nullptr, *r2 = nullptr;
  REQUIRE(tcgat_evaluate(m, c, nullptr, &r1) == TCGAT_OK);
  REQUIRE(tcgat_evaluate(back, c, nullptr, &r2) == TCGAT_OK);
  char *j1 = nullptr, *j2 = nullptr, *table = nullptr;
  REQUIRE(tcgat_report_json(r1, &j1) == TCGAT_OK);
  REQUIRE(tcgat_report_json(r2, &j2) == TCGAT_OK);
  CHECK(take(j1) == take(j2));
  REQUIRE(tcgat_report_table(r1, &table) == TCGAT_OK);
  CHECK(take(table).find("macro") != std::string::npos);
  const double macro = tcgat_report_macro_f1(r1);
  CHECK(macro >= 0.0);
  CHECK(macro <= 1.0);
  CHECK(tcgat_model_load("/nonexistent.ckpt", &back) == TCGAT_ERR_IO);
  tcgat_report_free(r1);
  tcgat_report_free(r2);
  tcgat_model_free(m);
  tcgat_model_free(back);
  tcgat_config_free(cfg);
  tcgat_corpus_free(c);
}

TEST_CASE("numerical failure maps to its own status") {
  tcgat_corpus* c = nullptr;
  REQUIRE(tcgat_corpus_synthesize(16, 2, nullptr, &c) == TCGAT_OK);
  auto* cfg = small_config();
  REQUIRE(tcgat_config_set(cfg, "lr", "1e35") == TCGAT_OK);
  tcgat_model* m = nullptr;
  CHECK(tcgat_train(cfg, c, nullptr, nullptr, nullptr, &m) == TCGAT_ERR_NUMERICAL);
  CHECK(m == nullptr);
  tcgat_config_free(cfg);
  tcgat_corpus_free(c);
}

TEST_CASE("gradient suite through the C API") {
  char* report = nullptr;
  double worst = 1.0;
  CHECK(tcgat_gradcheck(0, &report, &worst) == TCGAT_OK);
  CHECK(worst < 1e-4);
  CHECK(take(report).find("tgat_layer") != std::string::npos);
}
