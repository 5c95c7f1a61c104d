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

#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/index.hpp"

namespace sidr {

/// Stages of a retrieval pipeline, timed separately:
///   tokenize_corpus  T(D)     bag-of-tokens index build
///   embed_corpus     E(D)     parametric index build
///   embed_queries    E(q)
///   score            f(q, D)  batched search
///   rerank_embed     E(p)     embedding the top-m candidates of every query
enum class BenchStage { kTokenizeCorpus, kEmbedCorpus, kEmbedQueries, kScore, kRerankEmbed };

inline constexpr size_t kBenchRepetitions = 10;

const char*
bench_stage_name(BenchStage s);

BenchStage
parse_bench_stage(std::string_view name);

enum class ScoreIndex { kBot, kParam };

struct BenchConfig {
    size_t workers = 1;
    size_t topk = 10;
    size_t m = 100;
    ScoreIndex score_index = ScoreIndex::kBot;
};

struct BenchInputs {
    const Vocabulary* vocab = nullptr;
    const Corpus* corpus = nullptr;
    std::span<const Query> queries;
    const ToyProvider* encoder = nullptr;
};

struct StageReport {
    std::string stage;
    size_t repetitions = kBenchRepetitions;
    std::string trimming = "drop one max and one min";
    std::vector<double> samples;  // seconds
    std::vector<double> trimmed;  // seconds, sorted
    double mean = 0.0;            // trimmed mean, seconds
    size_t items = 0;
    double items_per_sec = 0.0;
    size_t peak_memory_bytes = 0;  // size of the structures the stage produces
    size_t workers = 1;
    size_t k_doc = 0;
    std::string corpus_fingerprint;
};

/// Sorts, drops the largest and smallest sample, averages the rest.
/// Requires at least three samples.
double
trimmed_mean(std::span<const double> samples, std::vector<double>* kept = nullptr);

/// Runs the stage kBenchRepetitions times on in-memory inputs. Timers cover the
/// computation only. With workers > 1 the score stage also checks its results
/// against a sequential run (Error(kInput) on mismatch).
StageReport
bench_stage(BenchStage stage, const BenchInputs& in, const BenchConfig& cfg);

std::string
report_json(const StageReport& r);

/// One row, columns shaped like a per-stage latency table; stages not in
/// `reports` are left empty.
void
write_stage_table_csv(std::ostream& out, std::span<const StageReport> reports);

}  // namespace sidr
