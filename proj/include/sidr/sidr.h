// Copyright 2026-present the sidr project
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

#ifndef SIDR_SIDR_H
#define SIDR_SIDR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SIDR_API __declspec(dllexport)
#else
#define SIDR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning sidr_status leaves a message for
 * sidr_last_error() on failure; output arguments are untouched then. */
typedef enum sidr_status {
    SIDR_OK = 0,
    SIDR_E_FORMAT = 1,
    SIDR_E_CONTRACT = 2,
    SIDR_E_LOOKUP = 3,
    SIDR_E_IO = 4,
    SIDR_E_BUILD = 5,
    SIDR_E_INPUT = 6,
    SIDR_E_CONFIG = 7,
    SIDR_E_MINER = 8,
    SIDR_E_NUMERIC = 9,
    SIDR_E_TRAINING = 10,
    SIDR_E_INTERNAL = 11
} sidr_status;

typedef struct sidr_vocab sidr_vocab;
typedef struct sidr_corpus sidr_corpus;
typedef struct sidr_queries sidr_queries;
typedef struct sidr_provider sidr_provider;
typedef struct sidr_bot_index sidr_bot_index;
typedef struct sidr_param_index sidr_param_index;
typedef struct sidr_bm25_index sidr_bm25_index;
typedef struct sidr_hits sidr_hits;
typedef struct sidr_results sidr_results;
typedef struct sidr_bench_report sidr_bench_report;

/* Thread-local; valid until the next failing call on the same thread. */
SIDR_API const char*
sidr_last_error(void);

SIDR_API const char*
sidr_status_name(sidr_status status);

/* 0 ok, 2 usage, 3 data or format, 4 numeric or training. */
SIDR_API int
sidr_exit_code(sidr_status status);

/* Frees strings and arrays handed out by this library. NULL is ignored. */
SIDR_API void
sidr_string_free(char* s);

SIDR_API void
sidr_array_free(void* p);

SIDR_API uint64_t
sidr_mix_seed(uint64_t a, uint64_t b);

/* ---- vocabulary, corpus, queries ---- */

SIDR_API sidr_status
sidr_vocab_load(const char* path, sidr_vocab** out);

/* Word-level vocabulary over the corpus (title + text). */
SIDR_API sidr_status
sidr_vocab_from_corpus(const sidr_corpus* corpus, sidr_vocab** out);

SIDR_API sidr_status
sidr_vocab_save(const sidr_vocab* vocab, const char* path);

SIDR_API size_t
sidr_vocab_size(const sidr_vocab* vocab);

SIDR_API void
sidr_vocab_free(sidr_vocab* vocab);

/* JSON lines with id, title, text. */
SIDR_API sidr_status
sidr_corpus_load(const char* path, sidr_corpus** out);

SIDR_API size_t
sidr_corpus_size(const sidr_corpus* corpus);

SIDR_API const char*
sidr_corpus_id(const sidr_corpus* corpus, size_t ordinal);

/* Hex FNV-1a of ids and texts; caller frees. */
SIDR_API sidr_status
sidr_corpus_fingerprint(const sidr_corpus* corpus, char** out);

SIDR_API void
sidr_corpus_free(sidr_corpus* corpus);

/* JSON lines with id, query, answers. "-" reads stdin. */
SIDR_API sidr_status
sidr_queries_load(const char* path, sidr_queries** out);

SIDR_API size_t
sidr_queries_size(const sidr_queries* queries);

SIDR_API const char*
sidr_queries_id(const sidr_queries* queries, size_t i);

SIDR_API const char*
sidr_queries_text(const sidr_queries* queries, size_t i);

SIDR_API size_t
sidr_queries_answer_count(const sidr_queries* queries, size_t i);

SIDR_API const char*
sidr_queries_answer(const sidr_queries* queries, size_t i, size_t j);

SIDR_API void
sidr_queries_free(sidr_queries* queries);

/* ---- embedding providers ---- */

/* Toy encoder from a SIDRTOY1 parameter file. */
SIDR_API sidr_status
sidr_provider_toy(const sidr_vocab* vocab,
                  const char* params_path,
                  size_t k_query,
                  size_t k_doc,
                  sidr_provider** out);

/* Pre-computed SIDREMB1 embeddings. queries_path may be NULL, in which case
 * queries are looked up in the passage file. */
SIDR_API sidr_status
sidr_provider_files(const char* passages_path, const char* queries_path, sidr_provider** out);

/* Sparse query vector; dims ascending. File providers look the query up by
 * id, the toy encoder reads text. Free both arrays with sidr_array_free. */
SIDR_API sidr_status
sidr_provider_embed_query(const sidr_provider* provider,
                          const char* id,
                          const char* text,
                          uint32_t** dims,
                          double** weights,
                          size_t* nnz);

SIDR_API void
sidr_provider_free(sidr_provider* provider);

/* Writes uniform [-0.5, 0.5] toy parameters. */
SIDR_API sidr_status
sidr_toy_params_random(size_t vocab_size, size_t dims, uint64_t seed, const char* path);

/* ---- indexes ---- */

typedef enum sidr_index_kind {
    SIDR_INDEX_BOT = 0,
    SIDR_INDEX_PARAM = 1,
    SIDR_INDEX_BM25 = 2,
    SIDR_INDEX_UNKNOWN = 3
} sidr_index_kind;

SIDR_API sidr_status
sidr_index_kind_of(const char* path, sidr_index_kind* out);

SIDR_API sidr_status
sidr_bot_index_build(const sidr_corpus* corpus, const sidr_vocab* vocab, sidr_bot_index** out);

SIDR_API sidr_status
sidr_bot_index_open(const char* path, sidr_bot_index** out);

SIDR_API sidr_status
sidr_bot_index_save(const sidr_bot_index* index, const char* path);

SIDR_API size_t
sidr_bot_index_size(const sidr_bot_index* index);

SIDR_API size_t
sidr_bot_index_vocab_size(const sidr_bot_index* index);

/* Beta search with a caller-supplied sparse query. dims strictly ascending.
 * Safe to call concurrently on one handle. */
SIDR_API sidr_status
sidr_beta_search(const sidr_bot_index* index,
                 const uint32_t* dims,
                 const double* weights,
                 size_t nnz,
                 size_t topk,
                 int include_zeros,
                 sidr_hits** out);

/* Answer-free hard negative from the beta top-m. passage_id and text are
 * copies; free with sidr_string_free. corpus must be the indexed one. */
SIDR_API sidr_status
sidr_mine_negative(const sidr_bot_index* index,
                   const sidr_corpus* corpus,
                   const uint32_t* dims,
                   const double* weights,
                   size_t nnz,
                   const char* const* answers,
                   size_t answer_count,
                   size_t m,
                   uint64_t seed,
                   char** passage_id,
                   char** text,
                   int* from_fallback);

SIDR_API void
sidr_bot_index_free(sidr_bot_index* index);

/* max_nnz bounds every passage vector (0 = unchecked). */
SIDR_API sidr_status
sidr_param_index_build(const sidr_corpus* corpus,
                       const sidr_provider* provider,
                       size_t max_nnz,
                       sidr_param_index** out);

SIDR_API sidr_status
sidr_param_index_open(const char* path, sidr_param_index** out);

SIDR_API sidr_status
sidr_param_index_save(const sidr_param_index* index, const char* path);

SIDR_API size_t
sidr_param_index_size(const sidr_param_index* index);

SIDR_API void
sidr_param_index_free(sidr_param_index* index);

SIDR_API sidr_status
sidr_bm25_index_build(const sidr_corpus* corpus,
                      const sidr_vocab* vocab,
                      double k1,
                      double b,
                      sidr_bm25_index** out);

SIDR_API sidr_status
sidr_bm25_index_open(const char* path, sidr_bm25_index** out);

SIDR_API sidr_status
sidr_bm25_index_save(const sidr_bm25_index* index, const char* path);

SIDR_API size_t
sidr_bm25_index_size(const sidr_bm25_index* index);

SIDR_API void
sidr_bm25_index_free(sidr_bm25_index* index);

/* JSON summary of any index file: kind, counts, postings, bytes. */
SIDR_API sidr_status
sidr_inspect(const char* path, char** json);

/* ---- hits ---- */

SIDR_API size_t
sidr_hits_count(const sidr_hits* hits);

SIDR_API const char*
sidr_hits_id(const sidr_hits* hits, size_t i);

SIDR_API uint32_t
sidr_hits_ordinal(const sidr_hits* hits, size_t i);

SIDR_API double
sidr_hits_score(const sidr_hits* hits, size_t i);

SIDR_API void
sidr_hits_free(sidr_hits* hits);

/* ---- pipelines ---- */

typedef struct sidr_search_options {
    int include_zeros;
    size_t workers;
    size_t batch_size;
} sidr_search_options;

SIDR_API void
sidr_search_options_default(sidr_search_options* opts);

SIDR_API sidr_status
sidr_run_full(const sidr_queries* queries,
              const sidr_param_index* index,
              const sidr_provider* provider,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out);

SIDR_API sidr_status
sidr_run_beta(const sidr_queries* queries,
              const sidr_bot_index* index,
              const sidr_provider* provider,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out);

/* cache_path, when set, is read if present and rewritten with every passage
 * embedding made during the run. */
SIDR_API sidr_status
sidr_run_late(const sidr_queries* queries,
              const sidr_bot_index* index,
              const sidr_corpus* corpus,
              const sidr_provider* provider,
              size_t m,
              int cache_embeddings,
              const char* cache_path,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out);

SIDR_API sidr_status
sidr_run_bm25(const sidr_queries* queries,
              const sidr_bm25_index* index,
              const sidr_vocab* vocab,
              size_t topk,
              int query_tf,
              int include_zeros,
              sidr_results** out);

/* variant: full, beta, lex_doc, bin_doc, lex_query, bin_query, bot_overlap.
 * bot_index and param_index may be NULL and are then built from the corpus. */
SIDR_API sidr_status
sidr_run_ablation(const char* variant,
                  const sidr_queries* queries,
                  const sidr_vocab* vocab,
                  const sidr_corpus* corpus,
                  const sidr_provider* provider,
                  const sidr_bot_index* bot_index,
                  const sidr_param_index* param_index,
                  size_t k_doc,
                  size_t topk,
                  const sidr_search_options* opts,
                  sidr_results** out);

SIDR_API sidr_status
sidr_results_load(const char* path, sidr_results** out);

SIDR_API sidr_status
sidr_results_save(const sidr_results* results, const char* path);

SIDR_API sidr_status
sidr_results_jsonl(const sidr_results* results, char** out);

SIDR_API sidr_status
sidr_results_ledger_json(const sidr_results* results, size_t corpus_size, char** out);

SIDR_API size_t
sidr_results_query_count(const sidr_results* results);

SIDR_API const char*
sidr_results_query_id(const sidr_results* results, size_t i);

SIDR_API size_t
sidr_results_hit_count(const sidr_results* results, size_t i);

SIDR_API const char*
sidr_results_hit_id(const sidr_results* results, size_t i, size_t j);

SIDR_API double
sidr_results_hit_score(const sidr_results* results, size_t i, size_t j);

SIDR_API void
sidr_results_free(sidr_results* results);

/* ---- evaluation ---- */

SIDR_API sidr_status
sidr_eval_topk(const sidr_results* results,
               const sidr_queries* queries,
               const sidr_corpus* corpus,
               size_t k,
               double* accuracy);

/* qrels: TSV query_id, passage_id, grade. */
SIDR_API sidr_status
sidr_eval_mrr10(const sidr_results* results,
                const char* qrels_path,
                double* value,
                size_t* evaluated,
                size_t* skipped);

SIDR_API sidr_status
sidr_eval_ndcg10(const sidr_results* results,
                 const char* qrels_path,
                 int linear_gain,
                 double* value,
                 size_t* evaluated,
                 size_t* skipped);

/* ---- training ---- */

typedef struct sidr_train_config {
    size_t epochs;
    double lr;
    uint64_t seed;
    size_t batch_size;
    size_t dims;
    size_t k_query;
    size_t k_doc;
    const char* negatives; /* none, random, bm25, retrieved */
    size_t mine_m;
} sidr_train_config;

SIDR_API void
sidr_train_config_default(sidr_train_config* cfg);

/* Trains on JSON-lines examples {query, positive_passage_id, answers}.
 * heldout_path, init_params_path and bot_index may be NULL. Writes the
 * parameters to params_out and, when metrics_csv is set, the epoch log. */
SIDR_API sidr_status
sidr_train_toy(const sidr_vocab* vocab,
               const sidr_corpus* corpus,
               const char* train_path,
               const char* heldout_path,
               const sidr_train_config* cfg,
               const char* init_params_path,
               const sidr_bot_index* bot_index,
               const char* params_out,
               const char* metrics_csv,
               double* final_heldout_top1);

/* ---- synthetic data ---- */

/* Writes vocab.txt, corpus.jsonl, train.jsonl, heldout.jsonl and
 * queries.jsonl (the held-out split as queries) into dir. */
SIDR_API sidr_status
sidr_generate_separable(const char* dir, uint64_t seed);

/* Writes vocab.txt, corpus.jsonl and queries.jsonl into dir. */
SIDR_API sidr_status
sidr_generate_random(const char* dir,
                     size_t passages,
                     size_t words,
                     size_t queries,
                     uint64_t seed);

/* ---- benchmarking ---- */

typedef struct sidr_bench_config {
    size_t workers;
    size_t topk;
    size_t m;
    int score_param; /* score stage against a parametric index */
} sidr_bench_config;

SIDR_API void
sidr_bench_config_default(sidr_bench_config* cfg);

/* stage: tokenize_corpus, embed_corpus, embed_queries, score, rerank_embed.
 * provider must be a toy provider. */
SIDR_API sidr_status
sidr_bench_stage(const char* stage,
                 const sidr_vocab* vocab,
                 const sidr_corpus* corpus,
                 const sidr_queries* queries,
                 const sidr_provider* provider,
                 const sidr_bench_config* cfg,
                 sidr_bench_report** out);

SIDR_API double
sidr_bench_report_mean(const sidr_bench_report* report);

SIDR_API sidr_status
sidr_bench_report_json(const sidr_bench_report* report, char** out);

/* One CSV row over the given stage reports, with header. */
SIDR_API sidr_status
sidr_bench_table_csv(const sidr_bench_report* const* reports, size_t count, char** out);

SIDR_API void
sidr_bench_report_free(sidr_bench_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SIDR_SIDR_H */
