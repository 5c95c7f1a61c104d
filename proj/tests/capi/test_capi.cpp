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

#include <gtest/gtest.h>

#include <memory>

#include "fixtures.hpp"
#include "sidr/error.hpp"
#include "sidr/pipelines.hpp"
#include "sidr/sidr.h"
#include "sidr/synth.hpp"
#include "sidr/train.hpp"

namespace sidr {
namespace {

struct CHandles {
    sidr_vocab* vocab = nullptr;
    sidr_corpus* corpus = nullptr;
    sidr_bot_index* bot = nullptr;

    ~CHandles() {
        sidr_bot_index_free(bot);
        sidr_corpus_free(corpus);
        sidr_vocab_free(vocab);
    }
};

void
open_c(const testing::TempDir& dir, const Vocabulary& vocab, const Corpus& corpus, CHandles& h) {
    save_vocab(vocab, dir.path("vocab.txt"));
    save_corpus(corpus, dir.path("corpus.jsonl"));
    ASSERT_EQ(sidr_vocab_load(dir.path("vocab.txt").c_str(), &h.vocab), SIDR_OK) << sidr_last_error();
    ASSERT_EQ(sidr_corpus_load(dir.path("corpus.jsonl").c_str(), &h.corpus), SIDR_OK) << sidr_last_error();
    ASSERT_EQ(sidr_bot_index_build(h.corpus, h.vocab, &h.bot), SIDR_OK) << sidr_last_error();
}

std::vector<uint32_t>
dims_of(const SparseVec& v) {
    std::vector<uint32_t> d;
    for (const auto& e : v.entries()) {
        d.push_back(e.dim);
    }
    return d;
}

std::vector<double>
weights_of(const SparseVec& v) {
    std::vector<double> w;
    for (const auto& e : v.entries()) {
        w.push_back(e.weight);
    }
    return w;
}

TEST(CApi, BetaSearchMatchesCore) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        testing::TempDir dir;
        auto s = testing::random_search_instance(seed, 300);
        CHandles h;
        open_c(dir, *s.vocab, s.corpus, h);
        auto core = build_bot_index(s.corpus, *s.vocab);
        for (int include_zeros : {0, 1}) {
            SearchOptions opts;
            opts.include_zeros = include_zeros != 0;
            for (const auto& q : s.queries) {
                auto dims = dims_of(q);
                auto weights = weights_of(q);
                sidr_hits* hits = nullptr;
                ASSERT_EQ(sidr_beta_search(h.bot, dims.data(), weights.data(), dims.size(), 30, include_zeros,
                                           &hits),
                          SIDR_OK)
                    << sidr_last_error();
                auto want = core.search(q, 30, opts);
                ASSERT_EQ(sidr_hits_count(hits), want.size());
                for (size_t i = 0; i < want.size(); ++i) {
                    EXPECT_EQ(sidr_hits_ordinal(hits, i), want.entries[i].ordinal);
                    EXPECT_EQ(sidr_hits_id(hits, i), want.entries[i].passage_id);
                    EXPECT_EQ(sidr_hits_score(hits, i), want.entries[i].score);
                }
                sidr_hits_free(hits);
            }
        }
    }
}

TEST(CApi, MineNegativeMatchesCore) {
    testing::TempDir dir;
    synth::RandomCorpusSpec spec;
    spec.passages = 300;
    spec.words = 40;
    spec.queries = 20;
    auto rc = synth::random_corpus(spec);
    CHandles h;
    open_c(dir, *rc.vocab, rc.corpus, h);
    auto core = build_bot_index(rc.corpus, *rc.vocab);
    std::mt19937_64 rng(5);
    for (const auto& q : rc.queries) {
        auto qv = testing::random_sparse(rc.vocab->size(), 5, rng);
        auto dims = dims_of(qv);
        auto weights = weights_of(qv);
        std::vector<const char*> answers;
        for (const auto& a : q.answers) {
            answers.push_back(a.c_str());
        }
        for (uint64_t seed = 0; seed < 5; ++seed) {
            char* id = nullptr;
            char* text = nullptr;
            int fallback = -1;
            ASSERT_EQ(sidr_mine_negative(h.bot, h.corpus, dims.data(), weights.data(), dims.size(),
                                         answers.data(), answers.size(), 10, seed, &id, &text, &fallback),
                      SIDR_OK)
                << sidr_last_error();
            auto want = mine_negative(qv, q.answers, core, rc.corpus, MinerConfig{10, seed});
            EXPECT_EQ(std::string(id), rc.corpus[want.ordinal].id);
            EXPECT_EQ(std::string(text), document_text(rc.corpus[want.ordinal]));
            EXPECT_EQ(fallback != 0, want.from_fallback);
            sidr_string_free(id);
            sidr_string_free(text);
        }
    }
}

TEST(CApi, MinerErrorsCarryTheirStatus) {
    testing::TempDir dir;
    auto vocab = testing::numbered_vocab(3);
    auto corpus = testing::make_corpus({"t0 gold", "t1 gold"});
    CHandles h;
    open_c(dir, *vocab, corpus, h);
    uint32_t dim = 0;
    double w = 1.0;
    const char* gold[] = {"gold"};
    char* id = nullptr;
    int fallback = 0;
    EXPECT_EQ(sidr_mine_negative(h.bot, h.corpus, &dim, &w, 1, gold, 1, 5, 0, &id, nullptr, &fallback),
              SIDR_E_MINER);
    EXPECT_EQ(sidr_mine_negative(h.bot, h.corpus, &dim, &w, 1, gold, 0, 5, 0, &id, nullptr, &fallback),
              SIDR_E_INPUT);
    EXPECT_EQ(id, nullptr);
}

TEST(CApi, MalformedQueryVectorsAreContractErrors) {
    testing::TempDir dir;
    auto s = testing::random_search_instance(1, 20);
    CHandles h;
    open_c(dir, *s.vocab, s.corpus, h);
    sidr_hits* hits = nullptr;
    uint32_t unsorted[] = {4, 2};
    uint32_t repeated[] = {2, 2};
    uint32_t out_of_range[] = {0, static_cast<uint32_t>(s.vocab_size)};
    double w[] = {1.0, 1.0};
    EXPECT_EQ(sidr_beta_search(h.bot, unsorted, w, 2, 5, 0, &hits), SIDR_E_CONTRACT);
    EXPECT_NE(std::string(sidr_last_error()), "");
    EXPECT_EQ(sidr_beta_search(h.bot, repeated, w, 2, 5, 0, &hits), SIDR_E_CONTRACT);
    EXPECT_EQ(sidr_beta_search(h.bot, out_of_range, w, 2, 5, 0, &hits), SIDR_E_CONTRACT);
    EXPECT_EQ(sidr_beta_search(nullptr, unsorted, w, 0, 5, 0, &hits), SIDR_E_CONTRACT);
    EXPECT_EQ(hits, nullptr);
    double nan[] = {std::nan(""), 1.0};
    uint32_t ok[] = {1, 2};
    EXPECT_EQ(sidr_beta_search(h.bot, ok, nan, 2, 5, 0, &hits), SIDR_E_NUMERIC);
}

TEST(CApi, StatusNamesAndExitCodes) {
    struct Row {
        sidr_status status;
        int exit_code;
    };
    const Row rows[] = {{SIDR_OK, 0},          {SIDR_E_FORMAT, 3},   {SIDR_E_CONTRACT, 2},
                        {SIDR_E_LOOKUP, 3},    {SIDR_E_IO, 3},       {SIDR_E_BUILD, 3},
                        {SIDR_E_INPUT, 3},     {SIDR_E_CONFIG, 2},   {SIDR_E_MINER, 3},
                        {SIDR_E_NUMERIC, 4},   {SIDR_E_TRAINING, 4}, {SIDR_E_INTERNAL, 3}};
    for (const auto& r : rows) {
        EXPECT_EQ(sidr_exit_code(r.status), r.exit_code) << sidr_status_name(r.status);
    }
    EXPECT_EQ(sidr_mix_seed(3, 4), mix_seed(3, 4));
}

TEST(CApi, FileErrorsMapToStatuses) {
    testing::TempDir dir;
    sidr_corpus* corpus = nullptr;
    EXPECT_EQ(sidr_corpus_load(dir.path("none.jsonl").c_str(), &corpus), SIDR_E_IO);
    testing::write_bytes(dir.path("bad.jsonl"), "{not json\n");
    EXPECT_EQ(sidr_corpus_load(dir.path("bad.jsonl").c_str(), &corpus), SIDR_E_FORMAT);
    testing::write_bytes(dir.path("dup.jsonl"), "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
    EXPECT_EQ(sidr_corpus_load(dir.path("dup.jsonl").c_str(), &corpus), SIDR_E_BUILD);
    EXPECT_EQ(corpus, nullptr);
    sidr_bot_index* bot = nullptr;
    testing::write_bytes(dir.path("x.bot"), "SIDRBOT1garbage");
    EXPECT_EQ(sidr_bot_index_open(dir.path("x.bot").c_str(), &bot), SIDR_E_FORMAT);
    sidr_index_kind kind = SIDR_INDEX_BOT;
    EXPECT_EQ(sidr_index_kind_of(dir.path("bad.jsonl").c_str(), &kind), SIDR_OK);
    EXPECT_EQ(kind, SIDR_INDEX_UNKNOWN);
}

TEST(CApi, PipelinesMatchCore) {
    testing::TempDir dir;
    ASSERT_EQ(sidr_generate_random(dir.root().c_str(), 150, 40, 12, 3), SIDR_OK) << sidr_last_error();
    ASSERT_EQ(sidr_toy_params_random(41, 4, 9, dir.path("toy.bin").c_str()), SIDR_OK) << sidr_last_error();
    sidr_vocab* vocab = nullptr;
    sidr_corpus* corpus = nullptr;
    sidr_queries* queries = nullptr;
    sidr_provider* provider = nullptr;
    sidr_bot_index* bot = nullptr;
    ASSERT_EQ(sidr_vocab_load(dir.path("vocab.txt").c_str(), &vocab), SIDR_OK);
    ASSERT_EQ(sidr_vocab_size(vocab), 41u);
    ASSERT_EQ(sidr_corpus_load(dir.path("corpus.jsonl").c_str(), &corpus), SIDR_OK);
    ASSERT_EQ(sidr_queries_load(dir.path("queries.jsonl").c_str(), &queries), SIDR_OK);
    ASSERT_EQ(sidr_provider_toy(vocab, dir.path("toy.bin").c_str(), 8, 8, &provider), SIDR_OK)
        << sidr_last_error();
    ASSERT_EQ(sidr_bot_index_build(corpus, vocab, &bot), SIDR_OK);

    sidr_search_options opts;
    sidr_search_options_default(&opts);
    sidr_results* late = nullptr;
    ASSERT_EQ(sidr_run_late(queries, bot, corpus, provider, 10, 0, nullptr, 5, &opts, &late), SIDR_OK)
        << sidr_last_error();

    auto core_vocab = std::make_shared<const Vocabulary>(load_vocab(dir.path("vocab.txt")));
    auto core_corpus = load_corpus(dir.path("corpus.jsonl"));
    auto core_queries = load_queries(dir.path("queries.jsonl"));
    ToyProvider toy(core_vocab, load_toy_params(dir.path("toy.bin")), EncoderConfig{8, 8, 0});
    RerankConfig rcfg;
    rcfg.m = 10;
    auto want = run_late(core_queries, build_bot_index(core_corpus, *core_vocab), core_corpus, toy, rcfg, 5);
    ASSERT_EQ(sidr_results_query_count(late), want.query_ids.size());
    for (size_t q = 0; q < want.query_ids.size(); ++q) {
        EXPECT_EQ(sidr_results_query_id(late, q), want.query_ids[q]);
        ASSERT_EQ(sidr_results_hit_count(late, q), want.rankings[q].size());
        for (size_t i = 0; i < want.rankings[q].size(); ++i) {
            EXPECT_EQ(sidr_results_hit_id(late, q, i), want.rankings[q].entries[i].passage_id);
            EXPECT_EQ(sidr_results_hit_score(late, q, i), want.rankings[q].entries[i].score);
        }
    }
    char* ledger = nullptr;
    ASSERT_EQ(sidr_results_ledger_json(late, 150, &ledger), SIDR_OK);
    EXPECT_EQ(std::string(ledger), ledger_json(want.ledger, 150));
    sidr_string_free(ledger);

    uint32_t* dims = nullptr;
    double* weights = nullptr;
    size_t nnz = 0;
    ASSERT_EQ(sidr_provider_embed_query(provider, "q", "w1 w2", &dims, &weights, &nnz), SIDR_OK);
    auto qv = toy.embed_query(Query{"q", "w1 w2", {}});
    ASSERT_EQ(nnz, qv.nnz());
    for (size_t i = 0; i < nnz; ++i) {
        EXPECT_EQ(dims[i], qv.entries()[i].dim);
        EXPECT_EQ(weights[i], qv.entries()[i].weight);
    }
    sidr_array_free(dims);
    sidr_array_free(weights);

    sidr_results_free(late);
    sidr_bot_index_free(bot);
    sidr_provider_free(provider);
    sidr_queries_free(queries);
    sidr_corpus_free(corpus);
    sidr_vocab_free(vocab);
}

}  // namespace
}  // namespace sidr
