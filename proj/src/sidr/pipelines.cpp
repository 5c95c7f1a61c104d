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

#include "sidr/pipelines.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "sidr/error.hpp"
#include "sidr/parallel.hpp"

namespace sidr {

namespace {

SparseVec
embed_passage_checked(const EmbeddingProvider& provider, const Passage& p) {
    try {
        return to_storage_precision(provider.embed_passage(p));
    } catch (const Error& e) {
        fail(e.code(), "embedding passage '" + p.id + "' failed: " + e.what());
    }
}

void
check_corpus_matches(const BotIndex& ix, const Corpus& corpus) {
    if (corpus.size() != ix.size()) {
        fail(ErrorCode::kConfig, "corpus has " + std::to_string(corpus.size()) +
                                     " passages but the index has " + std::to_string(ix.size()));
    }
    for (size_t i = 0; i < ix.size(); ++i) {
        if (corpus[i].id != ix.ids()[i]) {
            fail(ErrorCode::kConfig, "corpus and index disagree at ordinal " + std::to_string(i));
        }
    }
}

size_t
union_size(const std::vector<RankedList>& lists) {
    std::vector<uint32_t> all;
    for (const auto& l : lists) {
        for (const auto& h : l.entries) {
            all.push_back(h.ordinal);
        }
    }
    std::sort(all.begin(), all.end());
    return static_cast<size_t>(std::unique(all.begin(), all.end()) - all.begin());
}

}  // namespace

void
RerankConfig::validate() const {
    if (m < 1) {
        fail(ErrorCode::kConfig, "rerank: m must be >= 1");
    }
}

std::vector<SparseVec>
encode_queries(std::span<const Query> queries, const EmbeddingProvider& provider, size_t workers) {
    std::vector<SparseVec> out(queries.size());
    parallel_for(queries.size(), workers, [&](size_t i) {
        try {
            out[i] = provider.embed_query(queries[i]);
        } catch (const Error& e) {
            fail(e.code(), "embedding query '" + queries[i].id + "' failed: " + e.what());
        }
    });
    return out;
}

PipelineResult
run_full(std::span<const Query> queries,
         const ParamIndex& ix,
         const EmbeddingProvider& provider,
         size_t topk,
         const SearchOptions& opts) {
    PipelineResult res;
    auto qv = encode_queries(queries, provider, opts.workers);
    res.rankings = ix.search_batch(qv, topk, opts);
    for (const auto& q : queries) {
        res.query_ids.push_back(q.id);
    }
    res.ledger.query_embeds = queries.size();
    res.ledger.passage_embeds = ix.embed_calls();
    res.ledger.distinct_passage_embeds = ix.size();
    return res;
}

PipelineResult
run_beta(std::span<const Query> queries,
         const BotIndex& ix,
         const EmbeddingProvider& provider,
         size_t topk,
         const SearchOptions& opts) {
    PipelineResult res;
    auto qv = encode_queries(queries, provider, opts.workers);
    res.rankings = ix.search_batch(qv, topk, opts);
    for (const auto& q : queries) {
        res.query_ids.push_back(q.id);
    }
    res.ledger.query_embeds = queries.size();
    return res;
}

PipelineResult
run_late(std::span<const Query> queries,
         const BotIndex& ix,
         const Corpus& corpus,
         const EmbeddingProvider& provider,
         const RerankConfig& cfg,
         size_t topk,
         const SearchOptions& opts,
         EmbeddingStore* persistent_cache) {
    cfg.validate();
    check_corpus_matches(ix, corpus);
    PipelineResult res;
    auto qv = encode_queries(queries, provider, opts.workers);
    auto stage1 = ix.search_batch(qv, cfg.m, opts);
    for (const auto& q : queries) {
        res.query_ids.push_back(q.id);
    }
    res.ledger.query_embeds = queries.size();
    res.ledger.distinct_passage_embeds = union_size(stage1);

    const bool caching = cfg.cache_passage_embeddings || persistent_cache != nullptr;
    std::vector<std::vector<double>> stage2(queries.size());
    if (caching) {
        std::vector<uint32_t> wanted;
        for (const auto& l : stage1) {
            for (const auto& h : l.entries) {
                wanted.push_back(h.ordinal);
            }
        }
        std::sort(wanted.begin(), wanted.end());
        wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

        std::unordered_map<uint32_t, SparseVec> cache;
        std::vector<uint32_t> missing;
        for (auto ord : wanted) {
            if (persistent_cache != nullptr && persistent_cache->contains(corpus[ord].id)) {
                cache.emplace(ord, persistent_cache->get(corpus[ord].id));
            } else {
                missing.push_back(ord);
            }
        }
        std::vector<SparseVec> fresh(missing.size());
        parallel_for(missing.size(), opts.workers, [&](size_t i) {
            fresh[i] = embed_passage_checked(provider, corpus[missing[i]]);
        });
        for (size_t i = 0; i < missing.size(); ++i) {
            if (persistent_cache != nullptr) {
                persistent_cache->put(corpus[missing[i]].id, fresh[i]);
            }
            cache.emplace(missing[i], std::move(fresh[i]));
        }
        res.ledger.passage_embeds = missing.size();
        res.ledger.distinct_passage_embeds = missing.size();
        parallel_for(queries.size(), opts.workers, [&](size_t q) {
            for (const auto& h : stage1[q].entries) {
                stage2[q].push_back(dot(qv[q], cache.at(h.ordinal)));
            }
        });
    } else {
        std::atomic<size_t> calls{0};
        parallel_for(queries.size(), opts.workers, [&](size_t q) {
            for (const auto& h : stage1[q].entries) {
                auto pv = embed_passage_checked(provider, corpus[h.ordinal]);
                calls.fetch_add(1, std::memory_order_relaxed);
                stage2[q].push_back(dot(qv[q], pv));
            }
        });
        res.ledger.passage_embeds = calls.load();
    }

    res.rankings.resize(queries.size());
    for (size_t q = 0; q < queries.size(); ++q) {
        std::vector<uint32_t> ords;
        std::vector<double> scores;
        for (size_t i = 0; i < stage1[q].entries.size(); ++i) {
            if (!opts.include_zeros && stage2[q][i] == 0.0) {
                continue;
            }
            ords.push_back(stage1[q].entries[i].ordinal);
            scores.push_back(stage2[q][i]);
        }
        res.rankings[q] = rank_candidates(ords, scores, ix.ids(), topk);
    }
    return res;
}

void
write_results(std::ostream& out, const PipelineResult& result) {
    for (size_t q = 0; q < result.query_ids.size(); ++q) {
        nlohmann::json ranking = nlohmann::json::array();
        for (const auto& h : result.rankings[q].entries) {
            ranking.push_back({{"passage_id", h.passage_id}, {"score", h.score}});
        }
        out << nlohmann::json{{"query_id", result.query_ids[q]}, {"ranking", ranking}}.dump()
            << '\n';
    }
}

void
save_results(const std::string& path, const PipelineResult& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path);
    }
    write_results(out, result);
}

PipelineResult
load_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path);
    }
    PipelineResult res;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            auto obj = nlohmann::json::parse(line);
            res.query_ids.push_back(obj.at("query_id").get<std::string>());
            RankedList list;
            // Results files carry no ordinals; the rank position stands in.
            for (const auto& h : obj.at("ranking")) {
                list.entries.push_back({static_cast<uint32_t>(list.entries.size()),
                                        h.at("passage_id").get<std::string>(),
                                        h.at("score").get<double>()});
            }
            res.rankings.push_back(std::move(list));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::kFormat, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return res;
}

std::string
ledger_json(const CostLedger& ledger, size_t corpus_size) {
    nlohmann::json j{{"query_embeds", ledger.query_embeds},
                     {"passage_embeds", ledger.passage_embeds},
                     {"distinct_passage_embeds", ledger.distinct_passage_embeds},
                     {"total_embeds", ledger.total()},
                     {"corpus_size", corpus_size}};
    j["corpus_fraction"] =
        corpus_size == 0 ? 0.0 : static_cast<double>(ledger.total()) / static_cast<double>(corpus_size);
    return j.dump(2);
}

}  // namespace sidr
