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
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sidr/error.hpp"
#include "sidr/eval.hpp"

namespace sidr {
namespace {

RankedList
ranking(const std::vector<std::string>& ids) {
    RankedList l;
    for (size_t i = 0; i < ids.size(); ++i) {
        l.entries.push_back({static_cast<uint32_t>(i), ids[i], 1.0 / static_cast<double>(i + 1)});
    }
    return l;
}

PipelineResult
three_queries() {
    PipelineResult r;
    r.query_ids = {"q1", "q2", "q3"};
    r.rankings = {ranking({"a", "b", "c"}), ranking({"a"}), ranking({"c", "a"})};
    return r;
}

Qrels
three_qrels() {
    return {{"q1", {{"b", 1}, {"c", 2}}}, {"q2", {{"a", 0}}}, {"q3", {{"b", 1}}}};
}

TEST(Mrr, HandComputed) {
    auto m = mrr_at_10(three_queries(), three_qrels());
    // q1 finds its first relevant passage at rank 2, q3 finds none, q2 has no positives.
    EXPECT_DOUBLE_EQ(m.value, 0.25);
    EXPECT_EQ(m.evaluated, 2u);
    EXPECT_EQ(m.skipped, 1u);
}

TEST(Ndcg, HandComputedForBothGains) {
    PipelineResult r;
    r.query_ids = {"q1", "q2"};
    r.rankings = {ranking({"a", "b", "c"}), ranking({"a"})};
    Qrels qrels{{"q1", {{"b", 1}, {"c", 2}}}, {"q2", {{"a", 0}}}};
    auto e = ndcg_at_10(r, qrels);
    // (1/log2(3) + 3/2) / (3 + 1/log2(3))
    EXPECT_NEAR(e.value, 0.58688267143572, 1e-12);
    EXPECT_EQ(e.evaluated, 1u);
    EXPECT_EQ(e.skipped, 1u);
    auto l = ndcg_at_10(r, qrels, Gain::kLinear);
    // (1/log2(3) + 2/2) / (2 + 1/log2(3))
    EXPECT_NEAR(l.value, 0.6199062332840657, 1e-12);
}

TEST(Ndcg, PerfectRankingScoresOneAndCutsAtTen) {
    PipelineResult r;
    r.query_ids = {"q"};
    std::vector<std::string> ids;
    for (int i = 0; i < 12; ++i) {
        ids.push_back("p" + std::to_string(i));
    }
    r.rankings = {ranking(ids)};
    Qrels perfect{{"q", {{"p0", 3}, {"p1", 2}, {"p2", 1}}}};
    EXPECT_DOUBLE_EQ(ndcg_at_10(r, perfect).value, 1.0);
    Qrels beyond{{"q", {{"p10", 1}}}};
    EXPECT_EQ(ndcg_at_10(r, beyond).value, 0.0);
    EXPECT_EQ(mrr_at_10(r, beyond).value, 0.0);
    Qrels at_ten{{"q", {{"p9", 1}}}};
    EXPECT_DOUBLE_EQ(mrr_at_10(r, at_ten).value, 0.1);
}

TEST(Metrics, MissingQrelsIsInputError) {
    Qrels partial{{"q1", {{"a", 1}}}};
    try {
        mrr_at_10(three_queries(), partial);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInput);
    }
    EXPECT_THROW(ndcg_at_10(three_queries(), partial), Error);
}

TEST(TopkAccuracy, HandComputedAndMonotone) {
    auto corpus = testing::make_corpus({"paris is big", "berlin", "rome", "Paris again"});
    std::vector<Query> qs{{"q1", "x", {"paris"}}, {"q2", "y", {"rome"}}, {"q3", "z", {"oslo"}}};
    PipelineResult r;
    r.query_ids = {"q3", "q1", "q2"};
    r.rankings = {ranking({"d0"}), ranking({"d1", "d3"}), ranking({"d1", "d0", "d2"})};
    EXPECT_DOUBLE_EQ(topk_accuracy(r, qs, corpus, 1), 0.0);
    EXPECT_DOUBLE_EQ(topk_accuracy(r, qs, corpus, 2), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(topk_accuracy(r, qs, corpus, 3), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(topk_accuracy(r, qs, corpus, 100), 2.0 / 3.0);

    std::vector<Query> no_answer{{"q1", "x", {}}};
    EXPECT_THROW(topk_accuracy(r, no_answer, corpus, 1), Error);
    std::vector<Query> unknown{{"q9", "x", {"a"}}};
    EXPECT_THROW(topk_accuracy(r, unknown, corpus, 1), Error);
}

struct AblationWorld {
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<Query> queries;
    std::unique_ptr<ToyProvider> provider;
};

AblationWorld
ablation_world(uint64_t seed) {
    std::mt19937_64 rng(seed);
    AblationWorld w;
    const size_t words = 30;
    w.vocab = testing::numbered_vocab(words);
    auto text = [&](size_t n) {
        std::string t;
        for (size_t i = 0; i < n; ++i) {
            t += (t.empty() ? "t" : " t") + std::to_string(rng() % words);
        }
        return t;
    };
    std::vector<std::string> texts;
    for (int i = 0; i < 50; ++i) {
        texts.push_back(text(1 + rng() % 10));
    }
    w.corpus = testing::make_corpus(texts);
    for (int i = 0; i < 10; ++i) {
        w.queries.push_back({"q" + std::to_string(i), text(3), {}});
    }
    w.provider = std::make_unique<ToyProvider>(w.vocab, ToyEncoderParams::random(w.vocab->size(), 4, seed),
                                               EncoderConfig{12, 12, 0});
    return w;
}

TEST(Ablation, VariantRepresentations) {
    auto w = ablation_world(1);
    AblationInputs in{w.vocab.get(), &w.corpus, w.provider.get(), nullptr, nullptr, 12};
    auto bot = build_bot_index(w.corpus, *w.vocab);

    auto lex = prepare_ablation(AblationVariant::kLexDoc, w.queries, in);
    auto bin = prepare_ablation(AblationVariant::kBinDoc, w.queries, in);
    auto full = prepare_ablation(AblationVariant::kFull, w.queries, in);
    for (size_t i = 0; i < w.corpus.size(); ++i) {
        for (const auto& e : lex.index.vectors()[i].entries()) {
            EXPECT_TRUE(bot.vectors()[i].contains(e.dim));
            EXPECT_EQ(e.weight, full.index.vectors()[i].at(e.dim));
        }
        EXPECT_EQ(bin.index.vectors()[i].nnz(), full.index.vectors()[i].nnz());
        for (const auto& e : bin.index.vectors()[i].entries()) {
            EXPECT_EQ(e.weight, 1.0);
        }
    }
    auto binq = prepare_ablation(AblationVariant::kBinQuery, w.queries, in);
    auto lexq = prepare_ablation(AblationVariant::kLexQuery, w.queries, in);
    for (size_t q = 0; q < w.queries.size(); ++q) {
        auto qbot = bot_encode(tokenize(*w.vocab, w.queries[q].text), w.vocab->size());
        for (const auto& e : binq.queries[q].entries()) {
            EXPECT_EQ(e.weight, 1.0);
        }
        for (const auto& e : lexq.queries[q].entries()) {
            EXPECT_TRUE(qbot.contains(e.dim));
        }
    }
}

TEST(Ablation, BotOverlapRanksByIntersectionSize) {
    auto w = ablation_world(2);
    AblationInputs in{w.vocab.get(), &w.corpus, nullptr, nullptr, nullptr, 0};
    auto res = run_ablation(AblationVariant::kBotOverlap, w.queries, in, 50);
    EXPECT_EQ(res.ledger, (CostLedger{0, 0, 0}));
    for (size_t q = 0; q < w.queries.size(); ++q) {
        auto qids = oracle::tokenize_ids(w.vocab->tokens(), w.queries[q].text, kMaxSequenceTokens);
        std::set<uint32_t> qset(qids.begin(), qids.end());
        std::vector<oracle::Ranked> want;
        for (size_t i = 0; i < w.corpus.size(); ++i) {
            auto pids = oracle::tokenize_ids(w.vocab->tokens(), " " + w.corpus[i].text, kMaxSequenceTokens);
            std::set<uint32_t> pset(pids.begin(), pids.end());
            size_t overlap = 0;
            for (auto t : qset) {
                overlap += pset.count(t);
            }
            if (overlap > 0) {
                want.push_back({static_cast<uint32_t>(i), static_cast<double>(overlap)});
            }
        }
        std::stable_sort(want.begin(), want.end(),
                         [](const oracle::Ranked& a, const oracle::Ranked& b) { return a.score > b.score; });
        ASSERT_EQ(res.rankings[q].size(), want.size());
        for (size_t r = 0; r < want.size(); ++r) {
            EXPECT_EQ(res.rankings[q].entries[r].ordinal, want[r].ordinal);
            EXPECT_EQ(res.rankings[q].entries[r].score, want[r].score);
        }
    }
}

TEST(Ablation, FullAndBetaMatchPipelines) {
    auto w = ablation_world(3);
    AblationInputs in{w.vocab.get(), &w.corpus, w.provider.get(), nullptr, nullptr, 12};
    auto bot = build_bot_index(w.corpus, *w.vocab);
    auto par = build_param_index(w.corpus, *w.provider, 12);
    EXPECT_EQ(run_ablation(AblationVariant::kFull, w.queries, in, 20).rankings,
              run_full(w.queries, par, *w.provider, 20).rankings);
    EXPECT_EQ(run_ablation(AblationVariant::kBeta, w.queries, in, 20).rankings,
              run_beta(w.queries, bot, *w.provider, 20).rankings);
    in.bot_index = &bot;
    in.param_index = &par;
    EXPECT_EQ(run_ablation(AblationVariant::kLexDoc, w.queries, in, 20).ledger, (CostLedger{10, 50, 50}));
}

TEST(Ablation, NamesAndMissingEncoder) {
    for (auto v : {AblationVariant::kFull, AblationVariant::kBeta, AblationVariant::kLexDoc,
                   AblationVariant::kBinDoc, AblationVariant::kLexQuery, AblationVariant::kBinQuery,
                   AblationVariant::kBotOverlap}) {
        EXPECT_EQ(parse_ablation(ablation_name(v)), v);
    }
    EXPECT_THROW(parse_ablation("dense"), Error);
    auto w = ablation_world(4);
    AblationInputs in{w.vocab.get(), &w.corpus, nullptr, nullptr, nullptr, 0};
    try {
        run_ablation(AblationVariant::kBeta, w.queries, in, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
}

}  // namespace
}  // namespace sidr
