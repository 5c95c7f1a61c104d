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

/* Plain C client of the shared library. Exits non-zero on the first failed check. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sidr/sidr.h"

#define CHECK(cond)                                                         \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n",   \
                    __FILE__, __LINE__, #cond, sidr_last_error());          \
            return 1;                                                       \
        }                                                                   \
    } while (0)

static void
join(char* out, size_t size, const char* dir, const char* name) {
    snprintf(out, size, "%s/%s", dir, name);
}

int
main(int argc, char** argv) {
    char dir[512];
    char path[600];
    sidr_vocab* vocab = NULL;
    sidr_corpus* corpus = NULL;
    sidr_corpus* missing = NULL;
    sidr_queries* queries = NULL;
    sidr_bot_index* index = NULL;
    sidr_bot_index* reopened = NULL;
    sidr_hits* hits = NULL;
    sidr_index_kind kind = SIDR_INDEX_UNKNOWN;
    uint32_t dims[2] = {1, 3};
    uint32_t unsorted[2] = {3, 1};
    double weights[2] = {1.0, 0.5};
    const char* answers[1];
    char* passage_id = NULL;
    int from_fallback = -1;
    size_t i;

    if (argc < 2) {
        fprintf(stderr, "usage: %s <scratch-dir>\n", argv[0]);
        return 2;
    }
    snprintf(dir, sizeof dir, "%s", argv[1]);

    CHECK(sidr_generate_random(dir, 200, 50, 10, 1) == SIDR_OK);
    join(path, sizeof path, dir, "vocab.txt");
    CHECK(sidr_vocab_load(path, &vocab) == SIDR_OK);
    join(path, sizeof path, dir, "corpus.jsonl");
    CHECK(sidr_corpus_load(path, &corpus) == SIDR_OK);
    join(path, sizeof path, dir, "queries.jsonl");
    CHECK(sidr_queries_load(path, &queries) == SIDR_OK);
    CHECK(sidr_corpus_size(corpus) == 200);
    CHECK(sidr_queries_size(queries) == 10);

    CHECK(sidr_bot_index_build(corpus, vocab, &index) == SIDR_OK);
    join(path, sizeof path, dir, "index.bot");
    CHECK(sidr_bot_index_save(index, path) == SIDR_OK);
    CHECK(sidr_index_kind_of(path, &kind) == SIDR_OK && kind == SIDR_INDEX_BOT);
    CHECK(sidr_bot_index_open(path, &reopened) == SIDR_OK);
    CHECK(sidr_bot_index_size(reopened) == 200);
    CHECK(sidr_bot_index_vocab_size(reopened) == sidr_vocab_size(vocab));

    CHECK(sidr_beta_search(reopened, dims, weights, 2, 10, 0, &hits) == SIDR_OK);
    CHECK(sidr_hits_count(hits) > 0 && sidr_hits_count(hits) <= 10);
    for (i = 1; i < sidr_hits_count(hits); ++i) {
        CHECK(sidr_hits_score(hits, i - 1) >= sidr_hits_score(hits, i));
    }
    CHECK(strcmp(sidr_hits_id(hits, 0), sidr_corpus_id(corpus, sidr_hits_ordinal(hits, 0))) == 0);
    sidr_hits_free(hits);
    hits = NULL;

    CHECK(sidr_beta_search(reopened, unsorted, weights, 2, 10, 0, &hits) == SIDR_E_CONTRACT);
    CHECK(hits == NULL);
    CHECK(strlen(sidr_last_error()) > 0);
    CHECK(sidr_beta_search(reopened, dims, weights, 2, 10, 0, NULL) == SIDR_E_CONTRACT);
    CHECK(sidr_corpus_load("/nonexistent/corpus.jsonl", &missing) == SIDR_E_IO);
    CHECK(missing == NULL);
    CHECK(sidr_exit_code(SIDR_E_IO) == 3);
    CHECK(sidr_exit_code(SIDR_E_CONTRACT) == 2);
    CHECK(sidr_exit_code(SIDR_E_TRAINING) == 4);
    CHECK(sidr_exit_code(SIDR_OK) == 0);
    CHECK(strcmp(sidr_status_name(SIDR_E_MINER), "miner") == 0);

    CHECK(sidr_queries_answer_count(queries, 0) > 0);
    answers[0] = sidr_queries_answer(queries, 0, 0);
    CHECK(sidr_mine_negative(reopened, corpus, dims, weights, 2, answers, 1, 20, 7, &passage_id, NULL,
                             &from_fallback) == SIDR_OK);
    CHECK(passage_id != NULL && (from_fallback == 0 || from_fallback == 1));
    sidr_string_free(passage_id);

    sidr_bot_index_free(reopened);
    sidr_bot_index_free(index);
    sidr_queries_free(queries);
    sidr_corpus_free(corpus);
    sidr_vocab_free(vocab);
    printf("capi smoke ok\n");
    return 0;
}
