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

#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "sidr/bench.hpp"
#include "sidr/error.hpp"
#include "sidr/synth.hpp"

namespace sidr {
namespace {

TEST(TrimmedMean, DropsOneMaxAndOneMin) {
    std::vector<double> s{5.0, 1.0, 100.0, 2.0, 3.0, 4.0, 6.0, 7.0, 8.0, 0.0};
    std::vector<double> kept;
    // Kept: 1..8, mean 4.5.
    EXPECT_DOUBLE_EQ(trimmed_mean(s, &kept), 4.5);
    EXPECT_EQ(kept, (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
    std::vector<double> ties{2.0, 2.0, 2.0};
    EXPECT_EQ(trimmed_mean(ties), 2.0);
    std::vector<double> two{1.0, 2.0};
    EXPECT_THROW(trimmed_mean(two), Error);
}

class BenchStages : public ::testing::Test {
protected:
    void
    SetUp() override {
        synth::RandomCorpusSpec spec;
        spec.passages = 200;
        spec.words = 50;
        spec.queries = 20;
        data_ = synth::random_corpus(spec);
        encoder_ = std::make_unique<ToyProvider>(
            data_.vocab, ToyEncoderParams::random(data_.vocab->size(), 4, 1), EncoderConfig{16, 16, 0});
    }

    BenchInputs
    inputs() const {
        return {data_.vocab.get(), &data_.corpus, data_.queries, encoder_.get()};
    }

    synth::RandomCorpus data_;
    std::unique_ptr<ToyProvider> encoder_;
};

TEST_F(BenchStages, EveryStageReportsTenSamples) {
    for (auto stage : {BenchStage::kTokenizeCorpus, BenchStage::kEmbedCorpus, BenchStage::kEmbedQueries,
                       BenchStage::kScore, BenchStage::kRerankEmbed}) {
        BenchConfig cfg;
        cfg.m = 5;
        auto r = bench_stage(stage, inputs(), cfg);
        EXPECT_EQ(r.stage, bench_stage_name(stage));
        EXPECT_EQ(parse_bench_stage(r.stage), stage);
        ASSERT_EQ(r.samples.size(), kBenchRepetitions);
        ASSERT_EQ(r.trimmed.size(), kBenchRepetitions - 2);
        EXPECT_DOUBLE_EQ(r.mean, trimmed_mean(r.samples));
        EXPECT_GT(r.items, 0u);
        EXPECT_EQ(r.corpus_fingerprint, data_.corpus.fingerprint());

        auto j = nlohmann::json::parse(report_json(r));
        for (const char* key : {"stage", "repetitions", "trimming", "samples", "trimmed_samples", "mean",
                                "items", "items_per_sec", "peak_memory_bytes", "workers", "k_doc",
                                "corpus_fingerprint"}) {
            EXPECT_TRUE(j.contains(key)) << key;
        }
        EXPECT_EQ(j["repetitions"], 10);
    }
}

TEST_F(BenchStages, ParallelScoreStageAgreesWithSequential) {
    BenchConfig cfg;
    cfg.workers = 3;
    cfg.score_index = ScoreIndex::kParam;
    auto r = bench_stage(BenchStage::kScore, inputs(), cfg);
    EXPECT_EQ(r.workers, 3u);
}

TEST_F(BenchStages, CsvHasFixedColumns) {
    BenchConfig cfg;
    std::vector<StageReport> reports{bench_stage(BenchStage::kTokenizeCorpus, inputs(), cfg),
                                     bench_stage(BenchStage::kScore, inputs(), cfg)};
    std::ostringstream out;
    write_stage_table_csv(out, reports);
    std::istringstream in(out.str());
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "T_D,E_theta_D,E_theta_q,f_q_D,E_theta_p");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 4);
    EXPECT_EQ(row.find(",,"), row.find(','));
}

TEST(BenchStage, UnknownNameIsConfigError) {
    try {
        parse_bench_stage("warmup");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kConfig);
    }
}

}  // namespace
}  // namespace sidr
