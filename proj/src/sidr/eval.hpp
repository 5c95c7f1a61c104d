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

#include <span>
#include <string>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/index.hpp"
#include "sidr/pipelines.hpp"

namespace sidr {

/// Fraction of queries with an answer-bearing passage among their first k
/// results. Rankings are matched to queries by id; every query needs at least
/// one answer (Error(kInput) otherwise).
double
topk_accuracy(const PipelineResult& results,
              std::span<const Query> queries,
              const Corpus& corpus,
              size_t k);

struct MetricValue {
    double value = 0.0;
    size_t evaluated = 0;
    /// Queries without any positive judgment; they do not enter the mean.
    size_t skipped = 0;
};

enum class Gain { kExponential, kLinear };

/// Mean reciprocal rank of the first grade > 0 passage within the top 10.
/// A result query absent from `qrels` is Error(kInput).
MetricValue
mrr_at_10(const PipelineResult& results, const Qrels& qrels);

/// NDCG@10 with log2(rank + 1) discount and 2^grade - 1 gain (or the grade
/// itself for Gain::kLinear), normalized by the ideal ordering of the judged
/// passages.
MetricValue
ndcg_at_10(const PipelineResult& results, const Qrels& qrels, Gain gain = Gain::kExponential);

enum class AblationVariant {
    kFull,        // V(q) . V(p)
    kBeta,        // V(q) . BoT(p)
    kLexDoc,      // V(q) . lex(V(p))
    kBinDoc,      // V(q) . bin(V(p))
    kLexQuery,    // lex(V(q)) . BoT(p)
    kBinQuery,    // bin(V(q)) . BoT(p)
    kBotOverlap,  // BoT(q) . BoT(p)
};

const char*
ablation_name(AblationVariant v);

AblationVariant
parse_ablation(std::string_view name);

/// Everything a variant may need. Indexes that are null are derived from the
/// corpus on demand; `provider` is required by every variant except
/// bot_overlap.
struct AblationInputs {
    const Vocabulary* vocab = nullptr;
    const Corpus* corpus = nullptr;
    const EmbeddingProvider* provider = nullptr;
    const BotIndex* bot_index = nullptr;
    const ParamIndex* param_index = nullptr;
    size_t k_doc = 0;  // bound checked when building a parametric index
};

/// Query and index-side representations for one variant, built with the
/// generic vector operations.
struct AblationSetup {
    std::vector<SparseVec> queries;
    ParamIndex index;  // bot-side variants store BoT(p) as unit weights
};

AblationSetup
prepare_ablation(AblationVariant variant, std::span<const Query> queries, const AblationInputs& in);

PipelineResult
run_ablation(AblationVariant variant,
             std::span<const Query> queries,
             const AblationInputs& in,
             size_t topk,
             const SearchOptions& opts = {});

}  // namespace sidr
