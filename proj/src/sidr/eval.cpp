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

#include "sidr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sidr/answers.hpp"
#include "sidr/error.hpp"

namespace sidr {

namespace {

const RankedList&
ranking_for(const PipelineResult& results,
            const std::unordered_map<std::string, size_t>& by_id,
            const std::string& query_id) {
    auto it = by_id.find(query_id);
    if (it == by_id.end()) {
        fail(ErrorCode::kInput, "no results for query '" + query_id + "'");
    }
    return results.rankings[it->second];
}

const std::map<std::string, int>&
judgments_for(const Qrels& qrels, const std::string& query_id) {
    auto it = qrels.find(query_id);
    if (it == qrels.end()) {
        fail(ErrorCode::kInput, "query '" + query_id + "' has no qrels");
    }
    return it->second;
}

double
gain_of(int grade, Gain gain) {
    return gain == Gain::kExponential ? std::exp2(static_cast<double>(grade)) - 1.0
                                      : static_cast<double>(grade);
}

std::vector<BotVec>
passage_bots(const AblationInputs& in) {
    std::vector<BotVec> bots;
    bots.reserve(in.corpus->size());
    for (const auto& p : in.corpus->passages()) {
        bots.push_back(bot_encode(tokenize(*in.vocab, document_text(p)), in.vocab->size()));
    }
    return bots;
}

std::vector<SparseVec>
passage_params(const AblationInputs& in) {
    if (in.param_index != nullptr) {
        return in.param_index->vectors();
    }
    std::vector<SparseVec> out;
    out.reserve(in.corpus->size());
    for (const auto& p : in.corpus->passages()) {
        out.push_back(to_storage_precision(in.provider->embed_passage(p)));
    }
    return out;
}

}  // namespace

double
topk_accuracy(const PipelineResult& results,
              std::span<const Query> queries,
              const Corpus& corpus,
              size_t k) {
    if (queries.empty()) {
        return 0.0;
    }
    std::unordered_map<std::string, size_t> by_id;
    for (size_t i = 0; i < results.query_ids.size(); ++i) {
        by_id.emplace(results.query_ids[i], i);
    }
    size_t hits = 0;
    for (const auto& q : queries) {
        AnswerMatcher matcher(q.answers);
        if (matcher.empty()) {
            fail(ErrorCode::kInput, "query '" + q.id + "' has no answers");
        }
        const auto& list = ranking_for(results, by_id, q.id);
        const size_t depth = std::min(k, list.size());
        for (size_t r = 0; r < depth; ++r) {
            auto ord = corpus.ordinal_of(list.entries[r].passage_id);
            if (ord == corpus.size()) {
                fail(ErrorCode::kInput, "unknown passage '" + list.entries[r].passage_id + "'");
            }
            if (matcher.matches(document_text(corpus[ord]))) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(queries.size());
}

MetricValue
mrr_at_10(const PipelineResult& results, const Qrels& qrels) {
    MetricValue out;
    double sum = 0.0;
    for (size_t q = 0; q < results.query_ids.size(); ++q) {
        const auto& judged = judgments_for(qrels, results.query_ids[q]);
        bool any = std::any_of(judged.begin(), judged.end(), [](const auto& kv) { return kv.second > 0; });
        if (!any) {
            ++out.skipped;
            continue;
        }
        ++out.evaluated;
        const auto& list = results.rankings[q];
        for (size_t r = 0; r < std::min<size_t>(10, list.size()); ++r) {
            auto it = judged.find(list.entries[r].passage_id);
            if (it != judged.end() && it->second > 0) {
                sum += 1.0 / static_cast<double>(r + 1);
                break;
            }
        }
    }
    out.value = out.evaluated == 0 ? 0.0 : sum / static_cast<double>(out.evaluated);
    return out;
}

MetricValue
ndcg_at_10(const PipelineResult& results, const Qrels& qrels, Gain gain) {
    MetricValue out;
    double sum = 0.0;
    for (size_t q = 0; q < results.query_ids.size(); ++q) {
        const auto& judged = judgments_for(qrels, results.query_ids[q]);
        std::vector<int> grades;
        for (const auto& [pid, g] : judged) {
            grades.push_back(g);
        }
        std::sort(grades.rbegin(), grades.rend());
        double ideal = 0.0;
        for (size_t r = 0; r < std::min<size_t>(10, grades.size()); ++r) {
            ideal += gain_of(grades[r], gain) / std::log2(static_cast<double>(r) + 2.0);
        }
        if (ideal <= 0.0) {
            ++out.skipped;
            continue;
        }
        double dcg = 0.0;
        const auto& list = results.rankings[q];
        for (size_t r = 0; r < std::min<size_t>(10, list.size()); ++r) {
            auto it = judged.find(list.entries[r].passage_id);
            if (it != judged.end()) {
                dcg += gain_of(it->second, gain) / std::log2(static_cast<double>(r) + 2.0);
            }
        }
        sum += dcg / ideal;
        ++out.evaluated;
    }
    out.value = out.evaluated == 0 ? 0.0 : sum / static_cast<double>(out.evaluated);
    return out;
}

const char*
ablation_name(AblationVariant v) {
    switch (v) {
        case AblationVariant::kFull:
            return "full";
        case AblationVariant::kBeta:
            return "beta";
        case AblationVariant::kLexDoc:
            return "lex_doc";
        case AblationVariant::kBinDoc:
            return "bin_doc";
        case AblationVariant::kLexQuery:
            return "lex_query";
        case AblationVariant::kBinQuery:
            return "bin_query";
        case AblationVariant::kBotOverlap:
            return "bot_overlap";
    }
    return "unknown";
}

AblationVariant
parse_ablation(std::string_view name) {
    for (auto v : {AblationVariant::kFull, AblationVariant::kBeta, AblationVariant::kLexDoc,
                   AblationVariant::kBinDoc, AblationVariant::kLexQuery, AblationVariant::kBinQuery,
                   AblationVariant::kBotOverlap}) {
        if (name == ablation_name(v)) {
            return v;
        }
    }
    fail(ErrorCode::kConfig, "unknown ablation variant '" + std::string(name) + "'");
}

AblationSetup
prepare_ablation(AblationVariant variant, std::span<const Query> queries, const AblationInputs& in) {
    if (in.vocab == nullptr || in.corpus == nullptr) {
        fail(ErrorCode::kConfig, "ablation: vocabulary and corpus are required");
    }
    if (variant != AblationVariant::kBotOverlap && in.provider == nullptr) {
        fail(ErrorCode::kConfig,
             std::string("ablation '") + ablation_name(variant) + "' needs an encoder");
    }
    const size_t vocab_size = in.vocab->size();
    if (in.provider != nullptr && in.provider->vocab_size() != vocab_size) {
        fail(ErrorCode::kConfig, "ablation: encoder and vocabulary sizes differ");
    }
    AblationSetup setup;

    // Query side.
    for (const auto& q : queries) {
        auto qbot = bot_encode(tokenize(*in.vocab, q.text), vocab_size);
        switch (variant) {
            case AblationVariant::kFull:
            case AblationVariant::kBeta:
            case AblationVariant::kLexDoc:
            case AblationVariant::kBinDoc:
                setup.queries.push_back(in.provider->embed_query(q));
                break;
            case AblationVariant::kLexQuery:
                setup.queries.push_back(lex_mask(in.provider->embed_query(q), qbot));
                break;
            case AblationVariant::kBinQuery:
                setup.queries.push_back(binarize(in.provider->embed_query(q)));
                break;
            case AblationVariant::kBotOverlap:
                setup.queries.push_back(as_sparse(qbot));
                break;
        }
    }

    // Index side.
    std::vector<std::string> ids;
    for (const auto& p : in.corpus->passages()) {
        ids.push_back(p.id);
    }
    std::vector<SparseVec> side;
    switch (variant) {
        case AblationVariant::kFull:
            side = passage_params(in);
            break;
        case AblationVariant::kLexDoc: {
            auto params = passage_params(in);
            auto bots = in.bot_index != nullptr ? in.bot_index->vectors() : passage_bots(in);
            for (size_t i = 0; i < params.size(); ++i) {
                side.push_back(lex_mask(params[i], bots[i]));
                for (const auto& e : side.back().entries()) {
                    require(bots[i].contains(e.dim), "lex_doc: support escapes the BoT support");
                }
            }
            break;
        }
        case AblationVariant::kBinDoc:
            for (auto& v : passage_params(in)) {
                side.push_back(binarize(v));
            }
            break;
        case AblationVariant::kBeta:
        case AblationVariant::kLexQuery:
        case AblationVariant::kBinQuery:
        case AblationVariant::kBotOverlap: {
            auto bots = in.bot_index != nullptr ? in.bot_index->vectors() : passage_bots(in);
            for (const auto& b : bots) {
                side.push_back(as_sparse(b));
            }
            break;
        }
    }
    if (side.size() != ids.size()) {
        fail(ErrorCode::kConfig, "ablation: index does not match the corpus");
    }
    const bool parametric_side = variant == AblationVariant::kFull ||
                                 variant == AblationVariant::kLexDoc ||
                                 variant == AblationVariant::kBinDoc;
    setup.index = ParamIndex::from_vectors(vocab_size, std::move(ids), std::move(side),
                                           parametric_side ? in.k_doc : 0);
    return setup;
}

PipelineResult
run_ablation(AblationVariant variant,
             std::span<const Query> queries,
             const AblationInputs& in,
             size_t topk,
             const SearchOptions& opts) {
    auto setup = prepare_ablation(variant, queries, in);
    PipelineResult res;
    res.rankings = setup.index.search_batch(setup.queries, topk, opts);
    for (const auto& q : queries) {
        res.query_ids.push_back(q.id);
    }
    const bool query_embedded = variant != AblationVariant::kBotOverlap;
    const bool doc_embedded = variant == AblationVariant::kFull ||
                              variant == AblationVariant::kLexDoc ||
                              variant == AblationVariant::kBinDoc;
    res.ledger.query_embeds = query_embedded ? queries.size() : 0;
    res.ledger.passage_embeds = doc_embedded ? in.corpus->size() : 0;
    res.ledger.distinct_passage_embeds = res.ledger.passage_embeds;
    return res;
}

}  // namespace sidr
