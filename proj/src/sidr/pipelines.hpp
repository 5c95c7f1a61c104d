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

struct RerankConfig {
    size_t m = 100;
    bool cache_passage_embeddings = false;

    void
    validate() const;
};

/// Embedding work done by a pipeline run, counted in text chunks.
struct CostLedger {
    size_t query_embeds = 0;
    size_t passage_embeds = 0;
    size_t distinct_passage_embeds = 0;

    size_t
    total() const {
        return query_embeds + passage_embeds;
    }

    friend bool
    operator==(const CostLedger&, const CostLedger&) = default;
};

struct PipelineResult {
    std::vector<std::string> query_ids;
    std::vector<RankedList> rankings;  // parallel to query_ids
    CostLedger ledger;
};

/// One provider call per query, in query order; errors name the query.
std::vector<SparseVec>
encode_queries(std::span<const Query> queries,
               const EmbeddingProvider& provider,
               size_t workers = 1);

/// Parametric query against a parametric index. Passage embeds are the ones
/// spent building `ix`.
PipelineResult
run_full(std::span<const Query> queries,
         const ParamIndex& ix,
         const EmbeddingProvider& provider,
         size_t topk,
         const SearchOptions& opts = {});

/// Parametric query against the bag-of-tokens index; no passage embeds.
PipelineResult
run_beta(std::span<const Query> queries,
         const BotIndex& ix,
         const EmbeddingProvider& provider,
         size_t topk,
         const SearchOptions& opts = {});

/// Beta search for the top-m candidates, then embeds each candidate and ranks
/// by the parametric inner product alone. `corpus` supplies the passage text
/// and must be the corpus `ix` was built from. When `persistent_cache` is
/// given it seeds the cache and receives every new embedding.
PipelineResult
run_late(std::span<const Query> queries,
         const BotIndex& ix,
         const Corpus& corpus,
         const EmbeddingProvider& provider,
         const RerankConfig& cfg,
         size_t topk,
         const SearchOptions& opts = {},
         EmbeddingStore* persistent_cache = nullptr);

/// JSON-lines: {"query_id", "ranking": [{"passage_id", "score"}]}.
void
write_results(std::ostream& out, const PipelineResult& result);

void
save_results(const std::string& path, const PipelineResult& result);

/// Reads a results file back, keeping file order.
PipelineResult
load_results(const std::string& path);

std::string
ledger_json(const CostLedger& ledger, size_t corpus_size);

}  // namespace sidr
