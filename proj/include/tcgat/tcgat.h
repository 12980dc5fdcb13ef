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
/* C interface to the tcgat library. All objects are opaque handles owned by
 * the caller and released with the matching *_free function. Functions that
 * can fail return a tcgat_status; on failure tcgat_last_error() describes the
 * problem for the calling thread. Strings returned through char** out
 * parameters must be released with tcgat_string_free. */
#ifndef TCGAT_TCGAT_H_
#define TCGAT_TCGAT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TCGAT_BUILDING_LIBRARY)
#define TCGAT_API __attribute__((visibility("default")))
#else
#define TCGAT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tcgat_status {
  TCGAT_OK = 0,
  TCGAT_ERR_VALIDATION = 1,
  TCGAT_ERR_NUMERICAL = 2,
  TCGAT_ERR_IO = 3,
  TCGAT_ERR_ARGUMENT = 4,
  TCGAT_ERR_INTERNAL = 5
} tcgat_status;

typedef struct tcgat_corpus tcgat_corpus;
typedef struct tcgat_kg tcgat_kg;
typedef struct tcgat_config tcgat_config;
typedef struct tcgat_embeddings tcgat_embeddings;
typedef struct tcgat_model tcgat_model;
typedef struct tcgat_report tcgat_report;

typedef void (*tcgat_epoch_callback)(size_t epoch, double mean_loss, void* user);

TCGAT_API const char* tcgat_version(void);
TCGAT_API const char* tcgat_last_error(void);
TCGAT_API void tcgat_string_free(char* s);

/* Corpus. max_len 0 selects the default of 50 tokens. */
TCGAT_API tcgat_status tcgat_corpus_load(const char* path, size_t max_len, tcgat_corpus** out);
TCGAT_API tcgat_status tcgat_corpus_parse(const char* jsonl, size_t max_len, tcgat_corpus** out);
TCGAT_API tcgat_status tcgat_corpus_save(const tcgat_corpus* corpus, const char* path);
/* templates_json may be NULL for the built-in templates. */
TCGAT_API tcgat_status tcgat_corpus_synthesize(size_t n, uint64_t seed, const char* templates_json,
                                               tcgat_corpus** out);
TCGAT_API tcgat_status tcgat_corpus_split(const tcgat_corpus* corpus, double train_fraction, uint64_t seed,
                                          tcgat_corpus** train, tcgat_corpus** test);
TCGAT_API tcgat_status tcgat_corpus_stats_json(const tcgat_corpus* corpus, char** out_json);
TCGAT_API size_t tcgat_corpus_size(const tcgat_corpus* corpus);
TCGAT_API void tcgat_corpus_free(tcgat_corpus* corpus);

/* Causal knowledge graph. */
TCGAT_API tcgat_status tcgat_kg_build(const tcgat_corpus* train, tcgat_kg** out);
TCGAT_API tcgat_status tcgat_kg_load(const char* path, tcgat_kg** out);
TCGAT_API tcgat_status tcgat_kg_save(const tcgat_kg* kg, const char* path);
TCGAT_API tcgat_status tcgat_kg_to_json(const tcgat_kg* kg, char** out_json);
TCGAT_API size_t tcgat_kg_node_count(const tcgat_kg* kg);
TCGAT_API size_t tcgat_kg_edge_count(const tcgat_kg* kg);
TCGAT_API void tcgat_kg_free(tcgat_kg* kg);

/* Writes <dir>/<id>.json for every sentence: the six time-state matrices and
 * the KG adjacency. kg may be NULL to use a graph built from the corpus. */
TCGAT_API tcgat_status tcgat_export_matrices(const tcgat_corpus* corpus, const tcgat_kg* kg, const char* out_dir,
                                             size_t* written);

/* Training configuration. */
TCGAT_API tcgat_status tcgat_config_create(tcgat_config** out);
TCGAT_API tcgat_status tcgat_config_load(const char* path, tcgat_config** out);
TCGAT_API tcgat_status tcgat_config_parse(const char* text, tcgat_config** out);
TCGAT_API tcgat_status tcgat_config_set(tcgat_config* config, const char* key, const char* value);
TCGAT_API tcgat_status tcgat_config_get(const tcgat_config* config, const char* key, char** out_value);
TCGAT_API void tcgat_config_free(tcgat_config* config);

/* Precomputed contextual embeddings (TCEMB1). */
TCGAT_API tcgat_status tcgat_embeddings_load(const char* path, tcgat_embeddings** out);
TCGAT_API size_t tcgat_embeddings_dim(const tcgat_embeddings* embeddings);
TCGAT_API size_t tcgat_embeddings_count(const tcgat_embeddings* embeddings);
TCGAT_API void tcgat_embeddings_free(tcgat_embeddings* embeddings);

/* Model. embeddings and on_epoch may be NULL. */
TCGAT_API tcgat_status tcgat_train(const tcgat_config* config, const tcgat_corpus* train,
                                   const tcgat_embeddings* embeddings, tcgat_epoch_callback on_epoch, void* user,
                                   tcgat_model** out);
TCGAT_API tcgat_status tcgat_model_save(const tcgat_model* model, const char* path);
TCGAT_API tcgat_status tcgat_model_load(const char* path, tcgat_model** out);
TCGAT_API size_t tcgat_model_epochs(const tcgat_model* model);
TCGAT_API double tcgat_model_epoch_loss(const tcgat_model* model, size_t epoch);
TCGAT_API void tcgat_model_free(tcgat_model* model);

/* Evaluation. */
TCGAT_API tcgat_status tcgat_evaluate(const tcgat_model* model, const tcgat_corpus* test,
                                      const tcgat_embeddings* embeddings, tcgat_report** out);
TCGAT_API tcgat_status tcgat_report_json(const tcgat_report* report, char** out_json);
TCGAT_API tcgat_status tcgat_report_table(const tcgat_report* report, char** out_table);
TCGAT_API double tcgat_report_macro_f1(const tcgat_report* report);
TCGAT_API void tcgat_report_free(tcgat_report* report);

/* Trains every ablation variant on a seeded split of corpus. */
TCGAT_API tcgat_status tcgat_ablate(const tcgat_config* config, const tcgat_corpus* corpus,
                                    const tcgat_embeddings* embeddings, char** out_table, char** out_json);

/* Runs the finite-difference gradient suite. Returns TCGAT_ERR_NUMERICAL when
 * any check exceeds the tolerance; the report is produced either way. */
TCGAT_API tcgat_status tcgat_gradcheck(uint64_t seed, char** out_report, double* out_max_rel_error);

#ifdef __cplusplus
}
#endif

#endif /* TCGAT_TCGAT_H_ */
