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

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sidr/bm25.hpp"
#include "sidr/error.hpp"

namespace sidr {
namespace {

struct Bm25World {
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<std::vector<uint32_t>> docs;
};

Bm25World
make_world(uint64_t seed, size_t n, size_t words) {
    std::mt19937_64 rng(seed);
    Bm25World w;
    w.vocab = testing::numbered_vocab(words);
    std::vector<std::string> texts;
    for (size_t i = 0; i < n; ++i) {
        std::string t;
        std::vector<uint32_t> ids;
        for (size_t len = 1 + rng() % 15; len > 0; --len) {
            auto id = static_cast<uint32_t>(rng() % words);
            t += (t.empty() ? "t" : " t") + std::to_string(id);
            ids.push_back(id);
        }
        texts.push_back(t);
        w.docs.push_back(ids);
    }
    w.corpus = testing::make_corpus(texts);
    return w;
}

TEST(Bm25, CountsAndIdfMatchDefinitions) {
    auto w = make_world(1, 20, 12);
    auto ix = build_bm25(w.corpus, *w.vocab);
    double total = 0.0;
    for (size_t i = 0; i < w.docs.size(); ++i) {
        EXPECT_EQ(ix.doc_lengths()[i], w.docs[i].size());
        total += static_cast<double>(w.docs[i].size());
    }
    EXPECT_DOUBLE_EQ(ix.avg_doc_length(), total / 20.0);
    for (uint32_t t = 0; t < 12; ++t) {
        uint32_t df = 0;
        for (size_t i = 0; i < w.docs.size(); ++i) {
            auto tf = static_cast<uint32_t>(std::count(w.docs[i].begin(), w.docs[i].end(), t));
            EXPECT_EQ(ix.term_frequency(t, static_cast<uint32_t>(i)), tf);
            df += tf > 0 ? 1 : 0;
        }
        EXPECT_EQ(ix.doc_frequency(t), df);
        EXPECT_NEAR(ix.idf(t), std::log(1.0 + (20.0 - df + 0.5) / (df + 0.5)), 1e-15);
    }
}

TEST(Bm25, ScoresMatchTextbookFormula) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        auto w = make_world(seed, 20, 10 + seed);
        for (bool query_tf : {false, true}) {
            auto ix = Bm25Index::build(w.corpus, *w.vocab, {0.9, 0.4, query_tf});
            std::mt19937_64 rng(seed + 100);
            for (int q = 0; q < 10; ++q) {
                std::vector<TokenId> ids;
                for (size_t len = 1 + rng() % 5; len > 0; --len) {
                    ids.push_back(static_cast<TokenId>(rng() % (10 + seed)));
                }
                auto ranked = ix.score(TokenSeq{ids, ids.size()}, 20, true);
                ASSERT_EQ(ranked.size(), 20u);
                for (const auto& h : ranked.entries) {
                    const double want = oracle::bm25_score(w.docs, h.ordinal, ids, 0.9, 0.4, query_tf);
                    EXPECT_NEAR(h.score, want, 1e-9);
                }
                for (size_t i = 1; i < ranked.size(); ++i) {
                    EXPECT_GE(ranked.entries[i - 1].score, ranked.entries[i].score);
                }
            }
        }
    }
}

TEST(Bm25, OtherParametersAndZeroExclusion) {
    auto w = make_world(4, 30, 50);
    auto ix = build_bm25(w.corpus, *w.vocab, 1.2, 0.75);
    std::vector<TokenId> ids{3, 7, 3};
    auto ranked = ix.score(TokenSeq{ids, 3}, 30);
    for (const auto& h : ranked.entries) {
        EXPECT_GT(h.score, 0.0);
        EXPECT_NEAR(h.score, oracle::bm25_score(w.docs, h.ordinal, ids, 1.2, 0.75, false), 1e-9);
    }
    size_t matching = 0;
    for (const auto& d : w.docs) {
        matching += std::count(d.begin(), d.end(), 3u) + std::count(d.begin(), d.end(), 7u) > 0 ? 1 : 0;
    }
    EXPECT_EQ(ranked.size(), matching);
}

TEST(Bm25, SerializationRoundTrip) {
    testing::TempDir dir;
    auto w = make_world(5, 25, 15);
    auto ix = Bm25Index::build(w.corpus, *w.vocab, {1.1, 0.3, true});
    ix.save(dir.path("x.bm25"));
    auto back = Bm25Index::load(dir.path("x.bm25"));
    EXPECT_EQ(back.serialize(), ix.serialize());
    EXPECT_EQ(back.params().k1, 1.1);
    EXPECT_EQ(back.params().b, 0.3);
    EXPECT_EQ(back.ids(), ix.ids());
    std::vector<TokenId> ids{1, 2, 3};
    EXPECT_EQ(back.score(TokenSeq{ids, 3}, 10), ix.score(TokenSeq{ids, 3}, 10));
    EXPECT_EQ(detect_index_kind(dir.path("x.bm25")), IndexKind::kBm25);

    auto bytes = ix.serialize();
    for (size_t cut = 0; cut < bytes.size(); cut += 11) {
        EXPECT_THROW(Bm25Index::deserialize(bytes.substr(0, cut)), Error) << "cut " << cut;
    }
}

TEST(Bm25, EmptyCorpusIsBuildError) {
    auto vocab = testing::numbered_vocab(3);
    try {
        build_bm25(Corpus{}, *vocab);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kBuild);
    }
}

}  // namespace
}  // namespace sidr
