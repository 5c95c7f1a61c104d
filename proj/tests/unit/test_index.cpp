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

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sidr/error.hpp"
#include "sidr/index.hpp"

namespace sidr {
namespace {

ErrorCode
code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::kContract;
}

void
expect_same_ranking(const RankedList& got,
                    const std::vector<oracle::Ranked>& want,
                    const Corpus& corpus) {
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(got.entries[i].ordinal, want[i].ordinal) << "rank " << i;
        EXPECT_EQ(got.entries[i].score, want[i].score) << "rank " << i;
        EXPECT_EQ(got.entries[i].passage_id, corpus[want[i].ordinal].id);
    }
}

std::vector<std::string>
ids_of(const Corpus& c) {
    std::vector<std::string> ids;
    for (const auto& p : c.passages()) {
        ids.push_back(p.id);
    }
    return ids;
}

TEST(BotIndex, BuildMatchesFixtureVectors) {
    auto s = testing::random_search_instance(1, 200);
    auto ix = build_bot_index(s.corpus, *s.vocab);
    EXPECT_EQ(ix.vectors(), s.bot);
    EXPECT_EQ(ix.reconstruct_from_postings(), s.bot);
    EXPECT_EQ(ix.ids(), ids_of(s.corpus));
}

TEST(Search, BitExactAgainstBruteForce) {
    for (uint64_t seed = 0; seed < 60; ++seed) {
        SCOPED_TRACE("seed " + std::to_string(seed));
        auto s = testing::random_search_instance(seed);
        auto bot = BotIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.bot);
        auto par = ParamIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.param);
        std::vector<oracle::Dense> bot_docs;
        std::vector<oracle::Dense> par_docs;
        for (size_t i = 0; i < s.corpus.size(); ++i) {
            bot_docs.push_back(testing::dense(s.bot[i]));
            par_docs.push_back(testing::dense(s.param[i]));
        }
        for (const auto& q : s.queries) {
            const size_t topk = 1 + seed % 40;
            auto dq = testing::dense(q);
            expect_same_ranking(search_bot(bot, q, topk), oracle::brute_force(dq, bot_docs, topk, false),
                                s.corpus);
            expect_same_ranking(search_param(par, q, topk),
                                oracle::brute_force(dq, par_docs, topk, false), s.corpus);
        }
    }
}

TEST(Search, IncludeZerosAppendsUnmatchedPassages) {
    auto s = testing::random_search_instance(3, 80, 200, 2);
    auto bot = BotIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.bot);
    SearchOptions opts;
    opts.include_zeros = true;
    std::vector<oracle::Dense> docs;
    for (const auto& v : s.bot) {
        docs.push_back(testing::dense(v));
    }
    for (const auto& q : s.queries) {
        auto got = bot.search(q, s.corpus.size(), opts);
        EXPECT_EQ(got.size(), s.corpus.size());
        expect_same_ranking(got, oracle::brute_force(testing::dense(q), docs, s.corpus.size(), true),
                            s.corpus);
    }
}

TEST(Search, BatchAndWorkerCountsDoNotChangeResults) {
    auto s = testing::random_search_instance(17, 500);
    auto par = ParamIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.param);
    auto base = par.search_batch(s.queries, 25);
    for (size_t workers : {1, 2, 4}) {
        for (size_t batch : {1, 3, 64}) {
            SearchOptions opts;
            opts.workers = workers;
            opts.batch_size = batch;
            EXPECT_EQ(par.search_batch(s.queries, 25, opts), base);
        }
    }
    for (size_t i = 0; i < s.queries.size(); ++i) {
        EXPECT_EQ(par.search(s.queries[i], 25), base[i]);
    }
}

TEST(Search, QueryVocabularyMustMatch) {
    auto s = testing::random_search_instance(4, 10);
    auto bot = BotIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.bot);
    EXPECT_EQ(code_of([&] { bot.search(SparseVec(s.vocab_size + 1, {}), 5); }), ErrorCode::kContract);
}

TEST(Serialization, RoundTripsAndRebuildsByteIdentically) {
    testing::TempDir dir;
    auto s = testing::random_search_instance(8, 300);
    auto bot = build_bot_index(s.corpus, *s.vocab);
    auto par = ParamIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.param);
    bot.save(dir.path("a.bot"));
    build_bot_index(s.corpus, *s.vocab).save(dir.path("b.bot"));
    par.save(dir.path("a.par"));
    EXPECT_EQ(testing::read_bytes(dir.path("a.bot")), testing::read_bytes(dir.path("b.bot")));

    auto bot_back = BotIndex::load(dir.path("a.bot"));
    auto par_back = ParamIndex::load(dir.path("a.par"));
    EXPECT_EQ(bot_back, bot);
    EXPECT_EQ(par_back, par);
    EXPECT_EQ(par_back.reconstruct_from_postings(), s.param);
    EXPECT_EQ(bot_back.serialize(), bot.serialize());
    for (const auto& q : s.queries) {
        EXPECT_EQ(bot_back.search(q, 50), bot.search(q, 50));
        EXPECT_EQ(par_back.search(q, 50), par.search(q, 50));
    }
    // Same support, so the only difference is the per-posting weight.
    EXPECT_LT(testing::read_bytes(dir.path("a.bot")).size(),
              testing::read_bytes(dir.path("a.par")).size());

    EXPECT_EQ(detect_index_kind(dir.path("a.bot")), IndexKind::kBot);
    EXPECT_EQ(detect_index_kind(dir.path("a.par")), IndexKind::kParam);
    testing::write_bytes(dir.path("junk"), "hello world");
    EXPECT_EQ(detect_index_kind(dir.path("junk")), IndexKind::kUnknown);
}

TEST(Serialization, CorruptFilesAreFormatErrors) {
    auto s = testing::random_search_instance(9, 20, 16);
    auto bytes = BotIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.bot).serialize();
    auto pbytes = ParamIndex::from_vectors(s.vocab_size, ids_of(s.corpus), s.param).serialize();
    auto bad = bytes;
    bad[3] = '?';
    EXPECT_EQ(code_of([&] { BotIndex::deserialize(bad); }), ErrorCode::kFormat);
    EXPECT_EQ(code_of([&] { ParamIndex::deserialize(bytes); }), ErrorCode::kFormat);
    EXPECT_EQ(code_of([&] { BotIndex::deserialize(pbytes); }), ErrorCode::kFormat);
    auto version = bytes;
    version[8] = 2;
    EXPECT_EQ(code_of([&] { BotIndex::deserialize(version); }), ErrorCode::kFormat);
    for (size_t cut = 0; cut < bytes.size(); cut += 7) {
        EXPECT_EQ(code_of([&] { BotIndex::deserialize(bytes.substr(0, cut)); }), ErrorCode::kFormat)
            << "cut " << cut;
    }
    for (size_t cut = 0; cut < pbytes.size(); cut += 7) {
        EXPECT_EQ(code_of([&] { ParamIndex::deserialize(pbytes.substr(0, cut)); }),
                  ErrorCode::kFormat)
            << "cut " << cut;
    }
    EXPECT_EQ(code_of([&] { BotIndex::deserialize(bytes + std::string(1, '\0')); }), ErrorCode::kFormat);
    EXPECT_EQ(code_of([] { BotIndex::load("/nonexistent/x.bot"); }), ErrorCode::kIo);
}

TEST(ParamIndex, RejectsNonPositiveAndOverlongVectors) {
    std::vector<std::string> ids{"a", "b"};
    EXPECT_EQ(code_of([&] {
                  ParamIndex::from_vectors(4, ids, {SparseVec(4, {{0, 1.0}}), SparseVec(4, {{1, -0.5}})});
              }),
              ErrorCode::kBuild);
    EXPECT_EQ(code_of([&] {
                  ParamIndex::from_vectors(4, ids,
                                           {SparseVec(4, {{0, 1.0}}), SparseVec(4, {{1, 1.0}, {2, 1.0}})},
                                           1);
              }),
              ErrorCode::kBuild);
    EXPECT_EQ(code_of([&] {
                  ParamIndex::from_vectors(4, {"a", "a"}, {SparseVec(4, {}), SparseVec(4, {})});
              }),
              ErrorCode::kBuild);
    auto ok = ParamIndex::from_vectors(4, ids, {SparseVec(4, {{0, 0.1}}), SparseVec(4, {{1, 1.0}})}, 1);
    // Stored at float precision.
    EXPECT_EQ(ok.vectors()[0].at(0), static_cast<double>(0.1f));
}

TEST(ParamIndex, BuildCallsProviderOncePerPassageAndWrapsFailures) {
    auto vocab = testing::numbered_vocab(10);
    auto corpus = testing::make_corpus({"t1 t2", "t3", "t4 t4 t5"});
    ToyProvider provider(vocab, ToyEncoderParams::random(vocab->size(), 3, 5), EncoderConfig{3, 3, 0});
    auto ix = build_param_index(corpus, provider, 3);
    EXPECT_EQ(ix.embed_calls(), 3u);
    for (size_t i = 0; i < corpus.size(); ++i) {
        EXPECT_EQ(ix.vectors()[i], to_storage_precision(provider.embed_passage(corpus[i])));
    }
    auto bad = testing::make_corpus({"t1", " "});
    EXPECT_EQ(code_of([&] { build_param_index(bad, provider, 3); }), ErrorCode::kBuild);
    EXPECT_EQ(code_of([&] { build_param_index(corpus, provider, 2); }), ErrorCode::kBuild);
}

TEST(RankCandidates, ScoreDescendingThenOrdinal) {
    std::vector<uint32_t> ords{4, 1, 3, 0, 2};
    std::vector<double> scores{1.0, 2.0, 1.0, 0.5, 2.0};
    std::vector<std::string> ids{"a", "b", "c", "d", "e"};
    auto r = rank_candidates(ords, scores, ids, 4);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r.entries[0].ordinal, 1u);
    EXPECT_EQ(r.entries[1].ordinal, 2u);
    EXPECT_EQ(r.entries[2].ordinal, 3u);
    EXPECT_EQ(r.entries[3].ordinal, 4u);
    EXPECT_EQ(r.entries[3].passage_id, "e");
}

}  // namespace
}  // namespace sidr
