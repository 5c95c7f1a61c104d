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

#include "sidr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <nlohmann/json.hpp>
#include <numeric>

#include "sidr/error.hpp"
#include "sidr/pipelines.hpp"

namespace sidr {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double
time_once(Fn&& fn) {
    auto start = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - start).count();
}

size_t
sparse_bytes(const std::vector<SparseVec>& vs) {
    size_t n = 0;
    for (const auto& v : vs) {
        n += v.nnz() * sizeof(SparseEntry);
    }
    return n;
}

}  // namespace

const char*
bench_stage_name(BenchStage s) {
    switch (s) {
        case BenchStage::kTokenizeCorpus:
            return "tokenize_corpus";
        case BenchStage::kEmbedCorpus:
            return "embed_corpus";
        case BenchStage::kEmbedQueries:
            return "embed_queries";
        case BenchStage::kScore:
            return "score";
        case BenchStage::kRerankEmbed:
            return "rerank_embed";
    }
    return "unknown";
}

BenchStage
parse_bench_stage(std::string_view name) {
    for (auto s : {BenchStage::kTokenizeCorpus, BenchStage::kEmbedCorpus, BenchStage::kEmbedQueries,
                   BenchStage::kScore, BenchStage::kRerankEmbed}) {
        if (name == bench_stage_name(s)) {
            return s;
        }
    }
    fail(ErrorCode::kConfig, "unknown bench stage '" + std::string(name) + "'");
}

double
trimmed_mean(std::span<const double> samples, std::vector<double>* kept) {
    require(samples.size() >= 3, "trimmed_mean: need at least three samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> mid(sorted.begin() + 1, sorted.end() - 1);
    double mean = std::accumulate(mid.begin(), mid.end(), 0.0) / static_cast<double>(mid.size());
    if (kept != nullptr) {
        *kept = std::move(mid);
    }
    return mean;
}

StageReport
bench_stage(BenchStage stage, const BenchInputs& in, const BenchConfig& cfg) {
    if (in.vocab == nullptr || in.corpus == nullptr) {
        fail(ErrorCode::kConfig, "bench: vocabulary and corpus are required");
    }
    const bool needs_encoder = stage != BenchStage::kTokenizeCorpus;
    if (needs_encoder && in.encoder == nullptr) {
        fail(ErrorCode::kConfig, std::string("bench: stage ") + bench_stage_name(stage) +
                                     " needs an encoder");
    }
    if ((stage == BenchStage::kEmbedQueries || stage == BenchStage::kScore ||
         stage == BenchStage::kRerankEmbed) &&
        in.queries.empty()) {
        fail(ErrorCode::kConfig, std::string("bench: stage ") + bench_stage_name(stage) +
                                     " needs queries");
    }

    StageReport r;
    r.stage = bench_stage_name(stage);
    r.workers = cfg.workers;
    r.corpus_fingerprint = in.corpus->fingerprint();
    if (in.encoder != nullptr) {
        r.k_doc = in.encoder->config().k_doc;
    }
    SearchOptions opts;
    opts.workers = cfg.workers;

    switch (stage) {
        case BenchStage::kTokenizeCorpus: {
            BotIndex ix;
            for (size_t i = 0; i < kBenchRepetitions; ++i) {
                r.samples.push_back(time_once([&] { ix = build_bot_index(*in.corpus, *in.vocab); }));
            }
            r.items = in.corpus->size();
            r.peak_memory_bytes = ix.postings().ordinals.size() * sizeof(uint32_t) +
                                  ix.postings().offsets.size() * sizeof(uint64_t);
            break;
        }
        case BenchStage::kEmbedCorpus: {
            ParamIndex ix;
            for (size_t i = 0; i < kBenchRepetitions; ++i) {
                r.samples.push_back(time_once([&] {
                    ix = build_param_index(*in.corpus, *in.encoder, in.encoder->config().k_doc);
                }));
            }
            r.items = in.corpus->size();
            r.peak_memory_bytes = ix.postings().ordinals.size() * (sizeof(uint32_t) + sizeof(float)) +
                                  ix.postings().offsets.size() * sizeof(uint64_t);
            break;
        }
        case BenchStage::kEmbedQueries: {
            std::vector<SparseVec> qv;
            for (size_t i = 0; i < kBenchRepetitions; ++i) {
                r.samples.push_back(
                    time_once([&] { qv = encode_queries(in.queries, *in.encoder, cfg.workers); }));
            }
            r.items = in.queries.size();
            r.peak_memory_bytes = sparse_bytes(qv);
            break;
        }
        case BenchStage::kScore: {
            auto qv = encode_queries(in.queries, *in.encoder);
            std::vector<RankedList> out;
            SearchOptions seq_opts;
            if (cfg.score_index == ScoreIndex::kBot) {
                auto ix = build_bot_index(*in.corpus, *in.vocab);
                for (size_t i = 0; i < kBenchRepetitions; ++i) {
                    r.samples.push_back(time_once([&] { out = ix.search_batch(qv, cfg.topk, opts); }));
                }
                if (cfg.workers > 1 && out != ix.search_batch(qv, cfg.topk, seq_opts)) {
                    fail(ErrorCode::kInput, "bench: parallel search diverged from sequential");
                }
            } else {
                auto ix = build_param_index(*in.corpus, *in.encoder, in.encoder->config().k_doc);
                for (size_t i = 0; i < kBenchRepetitions; ++i) {
                    r.samples.push_back(time_once([&] { out = ix.search_batch(qv, cfg.topk, opts); }));
                }
                if (cfg.workers > 1 && out != ix.search_batch(qv, cfg.topk, seq_opts)) {
                    fail(ErrorCode::kInput, "bench: parallel search diverged from sequential");
                }
            }
            r.items = in.queries.size();
            r.peak_memory_bytes = in.corpus->size() * sizeof(double);  // per-query accumulator
            break;
        }
        case BenchStage::kRerankEmbed: {
            auto qv = encode_queries(in.queries, *in.encoder);
            auto ix = build_bot_index(*in.corpus, *in.vocab);
            auto stage1 = ix.search_batch(qv, cfg.m, opts);
            size_t items = 0;
            for (const auto& l : stage1) {
                items += l.size();
            }
            std::vector<std::vector<SparseVec>> embedded(stage1.size());
            for (size_t i = 0; i < kBenchRepetitions; ++i) {
                r.samples.push_back(time_once([&] {
                    for (size_t q = 0; q < stage1.size(); ++q) {
                        embedded[q].clear();
                        for (const auto& h : stage1[q].entries) {
                            embedded[q].push_back(in.encoder->embed_passage((*in.corpus)[h.ordinal]));
                        }
                    }
                }));
            }
            r.items = items;
            for (const auto& e : embedded) {
                r.peak_memory_bytes += sparse_bytes(e);
            }
            break;
        }
    }
    r.mean = trimmed_mean(r.samples, &r.trimmed);
    r.items_per_sec = r.mean > 0.0 ? static_cast<double>(r.items) / r.mean : 0.0;
    return r;
}

std::string
report_json(const StageReport& r) {
    nlohmann::json j{{"stage", r.stage},
                     {"repetitions", r.repetitions},
                     {"trimming", r.trimming},
                     {"samples", r.samples},
                     {"trimmed_samples", r.trimmed},
                     {"mean", r.mean},
                     {"items", r.items},
                     {"items_per_sec", r.items_per_sec},
                     {"peak_memory_bytes", r.peak_memory_bytes},
                     {"workers", r.workers},
                     {"k_doc", r.k_doc},
                     {"corpus_fingerprint", r.corpus_fingerprint}};
    return j.dump(2);
}

void
write_stage_table_csv(std::ostream& out, std::span<const StageReport> reports) {
    const BenchStage order[] = {BenchStage::kTokenizeCorpus, BenchStage::kEmbedCorpus,
                                BenchStage::kEmbedQueries, BenchStage::kScore,
                                BenchStage::kRerankEmbed};
    out << "T_D,E_theta_D,E_theta_q,f_q_D,E_theta_p\n";
    bool first = true;
    for (auto s : order) {
        if (!first) {
            out << ',';
        }
        first = false;
        for (const auto& r : reports) {
            if (r.stage == bench_stage_name(s)) {
                out << r.mean;
                break;
            }
        }
    }
    out << '\n';
}

}  // namespace sidr
