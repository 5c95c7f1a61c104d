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

#include "sidr/sidr.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sidr/bench.hpp"
#include "sidr/bm25.hpp"
#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/error.hpp"
#include "sidr/eval.hpp"
#include "sidr/index.hpp"
#include "sidr/pipelines.hpp"
#include "sidr/synth.hpp"
#include "sidr/train.hpp"
#include "sidr/vocab.hpp"

struct sidr_vocab {
    std::shared_ptr<const sidr::Vocabulary> vocab;
};

struct sidr_corpus {
    sidr::Corpus corpus;
};

struct sidr_queries {
    std::vector<sidr::Query> queries;
};

struct sidr_provider {
    std::unique_ptr<sidr::EmbeddingProvider> provider;
    const sidr::ToyProvider* toy = nullptr;
};

struct sidr_bot_index {
    sidr::BotIndex index;
};

struct sidr_param_index {
    sidr::ParamIndex index;
};

struct sidr_bm25_index {
    sidr::Bm25Index index;
};

struct sidr_hits {
    sidr::RankedList list;
};

struct sidr_results {
    sidr::PipelineResult result;
};

struct sidr_bench_report {
    sidr::StageReport report;
};

namespace {

thread_local std::string last_error;

sidr_status
status_of(sidr::ErrorCode code) {
    using sidr::ErrorCode;
    switch (code) {
        case ErrorCode::kFormat:
            return SIDR_E_FORMAT;
        case ErrorCode::kContract:
            return SIDR_E_CONTRACT;
        case ErrorCode::kLookup:
            return SIDR_E_LOOKUP;
        case ErrorCode::kIo:
            return SIDR_E_IO;
        case ErrorCode::kBuild:
            return SIDR_E_BUILD;
        case ErrorCode::kInput:
            return SIDR_E_INPUT;
        case ErrorCode::kConfig:
            return SIDR_E_CONFIG;
        case ErrorCode::kMiner:
            return SIDR_E_MINER;
        case ErrorCode::kNumeric:
            return SIDR_E_NUMERIC;
        case ErrorCode::kTraining:
            return SIDR_E_TRAINING;
    }
    return SIDR_E_INTERNAL;
}

template <typename Fn>
sidr_status
guard(Fn&& fn) {
    try {
        fn();
        return SIDR_OK;
    } catch (const sidr::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        last_error = e.what();
        return SIDR_E_FORMAT;
    } catch (const std::filesystem::filesystem_error& e) {
        last_error = e.what();
        return SIDR_E_IO;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SIDR_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SIDR_E_INTERNAL;
    }
}

void
need(const void* p, const char* what) {
    if (p == nullptr) {
        sidr::fail(sidr::ErrorCode::kContract, std::string(what) + " must not be NULL");
    }
}

char*
dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.data(), s.size());
    out[s.size()] = '\0';
    return out;
}

sidr::SparseVec
query_vector(size_t vocab_size, const uint32_t* dims, const double* weights, size_t nnz) {
    if (nnz > 0) {
        need(dims, "dims");
        need(weights, "weights");
    }
    std::vector<sidr::SparseEntry> entries;
    entries.reserve(nnz);
    for (size_t i = 0; i < nnz; ++i) {
        entries.push_back({dims[i], weights[i]});
    }
    return sidr::SparseVec(vocab_size, std::move(entries));
}

sidr::SearchOptions
search_options(const sidr_search_options* opts) {
    sidr::SearchOptions out;
    if (opts != nullptr) {
        out.include_zeros = opts->include_zeros != 0;
        out.workers = opts->workers;
        out.batch_size = opts->batch_size;
    }
    return out;
}

void
write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        sidr::fail(sidr::ErrorCode::kIo, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        sidr::fail(sidr::ErrorCode::kIo, "write failed for " + path.string());
    }
}

std::string
examples_jsonl(const std::vector<sidr::TrainExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        nlohmann::json j = {{"query", ex.query},
                            {"positive_passage_id", ex.positive_passage_id},
                            {"answers", ex.answers}};
        out += j.dump() + "\n";
    }
    return out;
}

template <typename T>
T*
release(std::unique_ptr<T> p) {
    return p.release();
}

}  // namespace

extern "C" {

const char*
sidr_last_error(void) {
    return last_error.c_str();
}

const char*
sidr_status_name(sidr_status status) {
    switch (status) {
        case SIDR_OK:
            return "ok";
        case SIDR_E_FORMAT:
            return "format";
        case SIDR_E_CONTRACT:
            return "contract";
        case SIDR_E_LOOKUP:
            return "lookup";
        case SIDR_E_IO:
            return "io";
        case SIDR_E_BUILD:
            return "build";
        case SIDR_E_INPUT:
            return "input";
        case SIDR_E_CONFIG:
            return "config";
        case SIDR_E_MINER:
            return "miner";
        case SIDR_E_NUMERIC:
            return "numeric";
        case SIDR_E_TRAINING:
            return "training";
        case SIDR_E_INTERNAL:
            return "internal";
    }
    return "unknown";
}

int
sidr_exit_code(sidr_status status) {
    switch (status) {
        case SIDR_OK:
            return 0;
        case SIDR_E_CONTRACT:
        case SIDR_E_CONFIG:
            return 2;
        case SIDR_E_NUMERIC:
        case SIDR_E_TRAINING:
            return 4;
        default:
            return 3;
    }
}

void
sidr_string_free(char* s) {
    std::free(s);
}

void
sidr_array_free(void* p) {
    std::free(p);
}

uint64_t
sidr_mix_seed(uint64_t a, uint64_t b) {
    return sidr::mix_seed(a, b);
}

// ---- vocabulary, corpus, queries

sidr_status
sidr_vocab_load(const char* path, sidr_vocab** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto v = std::make_unique<sidr_vocab>();
        v->vocab = std::make_shared<const sidr::Vocabulary>(sidr::load_vocab(path));
        *out = release(std::move(v));
    });
}

sidr_status
sidr_vocab_from_corpus(const sidr_corpus* corpus, sidr_vocab** out) {
    return guard([&] {
        need(corpus, "corpus");
        need(out, "out");
        std::vector<std::string> texts;
        texts.reserve(corpus->corpus.size());
        for (const auto& p : corpus->corpus.passages()) {
            texts.push_back(sidr::document_text(p));
        }
        auto v = std::make_unique<sidr_vocab>();
        v->vocab = std::make_shared<const sidr::Vocabulary>(sidr::build_word_vocab(texts));
        *out = release(std::move(v));
    });
}

sidr_status
sidr_vocab_save(const sidr_vocab* vocab, const char* path) {
    return guard([&] {
        need(vocab, "vocab");
        need(path, "path");
        sidr::save_vocab(*vocab->vocab, path);
    });
}

size_t
sidr_vocab_size(const sidr_vocab* vocab) {
    return vocab ? vocab->vocab->size() : 0;
}

void
sidr_vocab_free(sidr_vocab* vocab) {
    delete vocab;
}

sidr_status
sidr_corpus_load(const char* path, sidr_corpus** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto c = std::make_unique<sidr_corpus>();
        c->corpus = sidr::load_corpus(path);
        *out = release(std::move(c));
    });
}

size_t
sidr_corpus_size(const sidr_corpus* corpus) {
    return corpus ? corpus->corpus.size() : 0;
}

const char*
sidr_corpus_id(const sidr_corpus* corpus, size_t ordinal) {
    if (corpus == nullptr || ordinal >= corpus->corpus.size()) {
        return nullptr;
    }
    return corpus->corpus[ordinal].id.c_str();
}

sidr_status
sidr_corpus_fingerprint(const sidr_corpus* corpus, char** out) {
    return guard([&] {
        need(corpus, "corpus");
        need(out, "out");
        *out = dup_string(corpus->corpus.fingerprint());
    });
}

void
sidr_corpus_free(sidr_corpus* corpus) {
    delete corpus;
}

sidr_status
sidr_queries_load(const char* path, sidr_queries** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto q = std::make_unique<sidr_queries>();
        q->queries = sidr::load_queries(path);
        *out = release(std::move(q));
    });
}

size_t
sidr_queries_size(const sidr_queries* queries) {
    return queries ? queries->queries.size() : 0;
}

const char*
sidr_queries_id(const sidr_queries* queries, size_t i) {
    if (queries == nullptr || i >= queries->queries.size()) {
        return nullptr;
    }
    return queries->queries[i].id.c_str();
}

const char*
sidr_queries_text(const sidr_queries* queries, size_t i) {
    if (queries == nullptr || i >= queries->queries.size()) {
        return nullptr;
    }
    return queries->queries[i].text.c_str();
}

size_t
sidr_queries_answer_count(const sidr_queries* queries, size_t i) {
    if (queries == nullptr || i >= queries->queries.size()) {
        return 0;
    }
    return queries->queries[i].answers.size();
}

const char*
sidr_queries_answer(const sidr_queries* queries, size_t i, size_t j) {
    if (queries == nullptr || i >= queries->queries.size() ||
        j >= queries->queries[i].answers.size()) {
        return nullptr;
    }
    return queries->queries[i].answers[j].c_str();
}

void
sidr_queries_free(sidr_queries* queries) {
    delete queries;
}

// ---- providers

sidr_status
sidr_provider_toy(const sidr_vocab* vocab,
                  const char* params_path,
                  size_t k_query,
                  size_t k_doc,
                  sidr_provider** out) {
    return guard([&] {
        need(vocab, "vocab");
        need(params_path, "params_path");
        need(out, "out");
        auto params = sidr::load_toy_params(params_path);
        if (params.vocab_size != vocab->vocab->size()) {
            sidr::fail(sidr::ErrorCode::kConfig,
                       "encoder vocab_size " + std::to_string(params.vocab_size) +
                           " does not match vocabulary size " +
                           std::to_string(vocab->vocab->size()));
        }
        sidr::EncoderConfig cfg;
        cfg.k_query = k_query;
        cfg.k_doc = k_doc;
        cfg.vocab_size = params.vocab_size;
        auto toy = std::make_unique<sidr::ToyProvider>(vocab->vocab, std::move(params), cfg);
        auto p = std::make_unique<sidr_provider>();
        p->toy = toy.get();
        p->provider = std::move(toy);
        *out = release(std::move(p));
    });
}

sidr_status
sidr_provider_files(const char* passages_path, const char* queries_path, sidr_provider** out) {
    return guard([&] {
        need(passages_path, "passages_path");
        need(out, "out");
        auto passages = sidr::EmbeddingStore::load(passages_path);
        std::optional<sidr::EmbeddingStore> queries;
        if (queries_path != nullptr) {
            queries = sidr::EmbeddingStore::load(queries_path);
        }
        auto p = std::make_unique<sidr_provider>();
        p->provider = std::make_unique<sidr::FileProvider>(std::move(passages), std::move(queries));
        *out = release(std::move(p));
    });
}

sidr_status
sidr_provider_embed_query(const sidr_provider* provider,
                          const char* id,
                          const char* text,
                          uint32_t** dims,
                          double** weights,
                          size_t* nnz) {
    return guard([&] {
        need(provider, "provider");
        need(dims, "dims");
        need(weights, "weights");
        need(nnz, "nnz");
        sidr::Query q{id ? id : "", text ? text : "", {}};
        auto v = provider->provider->embed_query(q);
        const auto& e = v.entries();
        auto* d = static_cast<uint32_t*>(std::malloc(sizeof(uint32_t) * (e.size() + 1)));
        auto* w = static_cast<double*>(std::malloc(sizeof(double) * (e.size() + 1)));
        if (d == nullptr || w == nullptr) {
            std::free(d);
            std::free(w);
            throw std::bad_alloc();
        }
        for (size_t i = 0; i < e.size(); ++i) {
            d[i] = e[i].dim;
            w[i] = e[i].weight;
        }
        *dims = d;
        *weights = w;
        *nnz = e.size();
    });
}

void
sidr_provider_free(sidr_provider* provider) {
    delete provider;
}

sidr_status
sidr_toy_params_random(size_t vocab_size, size_t dims, uint64_t seed, const char* path) {
    return guard([&] {
        need(path, "path");
        sidr::save_toy_params(sidr::ToyEncoderParams::random(vocab_size, dims, seed), path);
    });
}

// ---- indexes

sidr_status
sidr_index_kind_of(const char* path, sidr_index_kind* out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        switch (sidr::detect_index_kind(path)) {
            case sidr::IndexKind::kBot:
                *out = SIDR_INDEX_BOT;
                break;
            case sidr::IndexKind::kParam:
                *out = SIDR_INDEX_PARAM;
                break;
            case sidr::IndexKind::kBm25:
                *out = SIDR_INDEX_BM25;
                break;
            case sidr::IndexKind::kUnknown:
                *out = SIDR_INDEX_UNKNOWN;
                break;
        }
    });
}

sidr_status
sidr_bot_index_build(const sidr_corpus* corpus, const sidr_vocab* vocab, sidr_bot_index** out) {
    return guard([&] {
        need(corpus, "corpus");
        need(vocab, "vocab");
        need(out, "out");
        auto ix = std::make_unique<sidr_bot_index>();
        ix->index = sidr::build_bot_index(corpus->corpus, *vocab->vocab);
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_bot_index_open(const char* path, sidr_bot_index** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto ix = std::make_unique<sidr_bot_index>();
        ix->index = sidr::BotIndex::load(path);
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_bot_index_save(const sidr_bot_index* index, const char* path) {
    return guard([&] {
        need(index, "index");
        need(path, "path");
        index->index.save(path);
    });
}

size_t
sidr_bot_index_size(const sidr_bot_index* index) {
    return index ? index->index.size() : 0;
}

size_t
sidr_bot_index_vocab_size(const sidr_bot_index* index) {
    return index ? index->index.vocab_size() : 0;
}

sidr_status
sidr_beta_search(const sidr_bot_index* index,
                 const uint32_t* dims,
                 const double* weights,
                 size_t nnz,
                 size_t topk,
                 int include_zeros,
                 sidr_hits** out) {
    return guard([&] {
        need(index, "index");
        need(out, "out");
        auto q = query_vector(index->index.vocab_size(), dims, weights, nnz);
        sidr::SearchOptions opts;
        opts.include_zeros = include_zeros != 0;
        auto hits = std::make_unique<sidr_hits>();
        hits->list = index->index.search(q, topk, opts);
        *out = release(std::move(hits));
    });
}

sidr_status
sidr_mine_negative(const sidr_bot_index* index,
                   const sidr_corpus* corpus,
                   const uint32_t* dims,
                   const double* weights,
                   size_t nnz,
                   const char* const* answers,
                   size_t answer_count,
                   size_t m,
                   uint64_t seed,
                   char** passage_id,
                   char** text,
                   int* from_fallback) {
    return guard([&] {
        need(index, "index");
        need(corpus, "corpus");
        need(passage_id, "passage_id");
        if (answer_count > 0) {
            need(answers, "answers");
        }
        if (corpus->corpus.size() != index->index.size()) {
            sidr::fail(sidr::ErrorCode::kConfig, "corpus does not match the index");
        }
        auto q = query_vector(index->index.vocab_size(), dims, weights, nnz);
        std::vector<std::string> ans;
        for (size_t i = 0; i < answer_count; ++i) {
            need(answers[i], "answer");
            ans.emplace_back(answers[i]);
        }
        auto mined = sidr::mine_negative(q, ans, index->index, corpus->corpus, {m, seed});
        const auto& p = corpus->corpus[mined.ordinal];
        char* id = dup_string(p.id);
        char* body = nullptr;
        if (text != nullptr) {
            try {
                body = dup_string(sidr::document_text(p));
            } catch (...) {
                std::free(id);
                throw;
            }
            *text = body;
        }
        *passage_id = id;
        if (from_fallback != nullptr) {
            *from_fallback = mined.from_fallback ? 1 : 0;
        }
    });
}

void
sidr_bot_index_free(sidr_bot_index* index) {
    delete index;
}

sidr_status
sidr_param_index_build(const sidr_corpus* corpus,
                       const sidr_provider* provider,
                       size_t max_nnz,
                       sidr_param_index** out) {
    return guard([&] {
        need(corpus, "corpus");
        need(provider, "provider");
        need(out, "out");
        auto ix = std::make_unique<sidr_param_index>();
        ix->index = sidr::build_param_index(corpus->corpus, *provider->provider, max_nnz);
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_param_index_open(const char* path, sidr_param_index** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto ix = std::make_unique<sidr_param_index>();
        ix->index = sidr::ParamIndex::load(path);
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_param_index_save(const sidr_param_index* index, const char* path) {
    return guard([&] {
        need(index, "index");
        need(path, "path");
        index->index.save(path);
    });
}

size_t
sidr_param_index_size(const sidr_param_index* index) {
    return index ? index->index.size() : 0;
}

void
sidr_param_index_free(sidr_param_index* index) {
    delete index;
}

sidr_status
sidr_bm25_index_build(const sidr_corpus* corpus,
                      const sidr_vocab* vocab,
                      double k1,
                      double b,
                      sidr_bm25_index** out) {
    return guard([&] {
        need(corpus, "corpus");
        need(vocab, "vocab");
        need(out, "out");
        auto ix = std::make_unique<sidr_bm25_index>();
        ix->index = sidr::Bm25Index::build(corpus->corpus, *vocab->vocab, {k1, b, false});
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_bm25_index_open(const char* path, sidr_bm25_index** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto ix = std::make_unique<sidr_bm25_index>();
        ix->index = sidr::Bm25Index::load(path);
        *out = release(std::move(ix));
    });
}

sidr_status
sidr_bm25_index_save(const sidr_bm25_index* index, const char* path) {
    return guard([&] {
        need(index, "index");
        need(path, "path");
        index->index.save(path);
    });
}

size_t
sidr_bm25_index_size(const sidr_bm25_index* index) {
    return index ? index->index.size() : 0;
}

void
sidr_bm25_index_free(sidr_bm25_index* index) {
    delete index;
}

sidr_status
sidr_inspect(const char* path, char** json) {
    return guard([&] {
        need(path, "path");
        need(json, "json");
        nlohmann::json j;
        j["path"] = path;
        j["bytes"] = std::filesystem::file_size(path);
        auto postings_stats = [&](const sidr::Postings& p, size_t vocab_size, size_t count) {
            size_t lists = 0;
            size_t longest = 0;
            for (size_t d = 0; d < vocab_size; ++d) {
                const size_t n = p.list_size(static_cast<sidr::TokenId>(d));
                lists += n > 0 ? 1 : 0;
                longest = std::max(longest, n);
            }
            j["vocab_size"] = vocab_size;
            j["passages"] = count;
            j["postings"] = p.ordinals.size();
            j["non_empty_lists"] = lists;
            j["longest_list"] = longest;
            j["mean_nnz"] =
                count ? static_cast<double>(p.ordinals.size()) / static_cast<double>(count) : 0.0;
        };
        switch (sidr::detect_index_kind(path)) {
            case sidr::IndexKind::kBot: {
                auto ix = sidr::BotIndex::load(path);
                j["kind"] = "bot";
                postings_stats(ix.postings(), ix.vocab_size(), ix.size());
                break;
            }
            case sidr::IndexKind::kParam: {
                auto ix = sidr::ParamIndex::load(path);
                j["kind"] = "param";
                postings_stats(ix.postings(), ix.vocab_size(), ix.size());
                break;
            }
            case sidr::IndexKind::kBm25: {
                auto ix = sidr::Bm25Index::load(path);
                j["kind"] = "bm25";
                size_t postings = 0;
                size_t lists = 0;
                for (size_t d = 0; d < ix.vocab_size(); ++d) {
                    const size_t df = ix.doc_frequency(static_cast<sidr::TokenId>(d));
                    postings += df;
                    lists += df > 0 ? 1 : 0;
                }
                j["vocab_size"] = ix.vocab_size();
                j["passages"] = ix.size();
                j["postings"] = postings;
                j["non_empty_lists"] = lists;
                j["avg_doc_length"] = ix.avg_doc_length();
                j["k1"] = ix.params().k1;
                j["b"] = ix.params().b;
                break;
            }
            case sidr::IndexKind::kUnknown:
                sidr::fail(sidr::ErrorCode::kFormat, std::string(path) + ": not an index file");
        }
        j["format_version"] = sidr::kIndexFormatVersion;
        *json = dup_string(j.dump());
    });
}

// ---- hits

size_t
sidr_hits_count(const sidr_hits* hits) {
    return hits ? hits->list.size() : 0;
}

const char*
sidr_hits_id(const sidr_hits* hits, size_t i) {
    if (hits == nullptr || i >= hits->list.size()) {
        return nullptr;
    }
    return hits->list.entries[i].passage_id.c_str();
}

uint32_t
sidr_hits_ordinal(const sidr_hits* hits, size_t i) {
    if (hits == nullptr || i >= hits->list.size()) {
        return 0;
    }
    return hits->list.entries[i].ordinal;
}

double
sidr_hits_score(const sidr_hits* hits, size_t i) {
    if (hits == nullptr || i >= hits->list.size()) {
        return 0.0;
    }
    return hits->list.entries[i].score;
}

void
sidr_hits_free(sidr_hits* hits) {
    delete hits;
}

// ---- pipelines

void
sidr_search_options_default(sidr_search_options* opts) {
    if (opts == nullptr) {
        return;
    }
    sidr::SearchOptions d;
    opts->include_zeros = d.include_zeros ? 1 : 0;
    opts->workers = d.workers;
    opts->batch_size = d.batch_size;
}

sidr_status
sidr_run_full(const sidr_queries* queries,
              const sidr_param_index* index,
              const sidr_provider* provider,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out) {
    return guard([&] {
        need(queries, "queries");
        need(index, "index");
        need(provider, "provider");
        need(out, "out");
        auto r = std::make_unique<sidr_results>();
        r->result = sidr::run_full(queries->queries, index->index, *provider->provider, topk,
                                   search_options(opts));
        *out = release(std::move(r));
    });
}

sidr_status
sidr_run_beta(const sidr_queries* queries,
              const sidr_bot_index* index,
              const sidr_provider* provider,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out) {
    return guard([&] {
        need(queries, "queries");
        need(index, "index");
        need(provider, "provider");
        need(out, "out");
        auto r = std::make_unique<sidr_results>();
        r->result = sidr::run_beta(queries->queries, index->index, *provider->provider, topk,
                                   search_options(opts));
        *out = release(std::move(r));
    });
}

sidr_status
sidr_run_late(const sidr_queries* queries,
              const sidr_bot_index* index,
              const sidr_corpus* corpus,
              const sidr_provider* provider,
              size_t m,
              int cache_embeddings,
              const char* cache_path,
              size_t topk,
              const sidr_search_options* opts,
              sidr_results** out) {
    return guard([&] {
        need(queries, "queries");
        need(index, "index");
        need(corpus, "corpus");
        need(provider, "provider");
        need(out, "out");
        sidr::RerankConfig cfg;
        cfg.m = m;
        cfg.cache_passage_embeddings = cache_embeddings != 0 || cache_path != nullptr;
        std::optional<sidr::EmbeddingStore> store;
        if (cache_path != nullptr) {
            if (std::filesystem::exists(cache_path)) {
                store = sidr::EmbeddingStore::load(cache_path);
                if (store->vocab_size() != provider->provider->vocab_size()) {
                    sidr::fail(sidr::ErrorCode::kConfig,
                               "embedding cache vocab_size does not match the encoder");
                }
            } else {
                store.emplace(provider->provider->vocab_size());
            }
        }
        auto r = std::make_unique<sidr_results>();
        r->result = sidr::run_late(queries->queries, index->index, corpus->corpus,
                                   *provider->provider, cfg, topk, search_options(opts),
                                   store ? &*store : nullptr);
        if (store) {
            store->save(cache_path);
        }
        *out = release(std::move(r));
    });
}

sidr_status
sidr_run_bm25(const sidr_queries* queries,
              const sidr_bm25_index* index,
              const sidr_vocab* vocab,
              size_t topk,
              int query_tf,
              int include_zeros,
              sidr_results** out) {
    return guard([&] {
        need(queries, "queries");
        need(index, "index");
        need(vocab, "vocab");
        need(out, "out");
        if (vocab->vocab->size() != index->index.vocab_size()) {
            sidr::fail(sidr::ErrorCode::kConfig, "vocabulary does not match the BM25 index");
        }
        sidr::Bm25Index ix = index->index;
        auto params = ix.params();
        params.query_tf = query_tf != 0;
        ix.set_params(params);
        auto r = std::make_unique<sidr_results>();
        for (const auto& q : queries->queries) {
            r->result.query_ids.push_back(q.id);
            r->result.rankings.push_back(
                ix.score(sidr::tokenize(*vocab->vocab, q.text), topk, include_zeros != 0));
        }
        *out = release(std::move(r));
    });
}

sidr_status
sidr_run_ablation(const char* variant,
                  const sidr_queries* queries,
                  const sidr_vocab* vocab,
                  const sidr_corpus* corpus,
                  const sidr_provider* provider,
                  const sidr_bot_index* bot_index,
                  const sidr_param_index* param_index,
                  size_t k_doc,
                  size_t topk,
                  const sidr_search_options* opts,
                  sidr_results** out) {
    return guard([&] {
        need(variant, "variant");
        need(queries, "queries");
        need(vocab, "vocab");
        need(corpus, "corpus");
        need(out, "out");
        sidr::AblationInputs in;
        in.vocab = vocab->vocab.get();
        in.corpus = &corpus->corpus;
        in.provider = provider ? provider->provider.get() : nullptr;
        in.bot_index = bot_index ? &bot_index->index : nullptr;
        in.param_index = param_index ? &param_index->index : nullptr;
        in.k_doc = k_doc;
        auto r = std::make_unique<sidr_results>();
        r->result = sidr::run_ablation(sidr::parse_ablation(variant), queries->queries, in, topk,
                                       search_options(opts));
        *out = release(std::move(r));
    });
}

sidr_status
sidr_results_load(const char* path, sidr_results** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto r = std::make_unique<sidr_results>();
        r->result = sidr::load_results(path);
        *out = release(std::move(r));
    });
}

sidr_status
sidr_results_save(const sidr_results* results, const char* path) {
    return guard([&] {
        need(results, "results");
        need(path, "path");
        sidr::save_results(path, results->result);
    });
}

sidr_status
sidr_results_jsonl(const sidr_results* results, char** out) {
    return guard([&] {
        need(results, "results");
        need(out, "out");
        std::ostringstream s;
        sidr::write_results(s, results->result);
        *out = dup_string(s.str());
    });
}

sidr_status
sidr_results_ledger_json(const sidr_results* results, size_t corpus_size, char** out) {
    return guard([&] {
        need(results, "results");
        need(out, "out");
        *out = dup_string(sidr::ledger_json(results->result.ledger, corpus_size));
    });
}

size_t
sidr_results_query_count(const sidr_results* results) {
    return results ? results->result.query_ids.size() : 0;
}

const char*
sidr_results_query_id(const sidr_results* results, size_t i) {
    if (results == nullptr || i >= results->result.query_ids.size()) {
        return nullptr;
    }
    return results->result.query_ids[i].c_str();
}

size_t
sidr_results_hit_count(const sidr_results* results, size_t i) {
    if (results == nullptr || i >= results->result.rankings.size()) {
        return 0;
    }
    return results->result.rankings[i].size();
}

const char*
sidr_results_hit_id(const sidr_results* results, size_t i, size_t j) {
    if (results == nullptr || i >= results->result.rankings.size() ||
        j >= results->result.rankings[i].size()) {
        return nullptr;
    }
    return results->result.rankings[i].entries[j].passage_id.c_str();
}

double
sidr_results_hit_score(const sidr_results* results, size_t i, size_t j) {
    if (results == nullptr || i >= results->result.rankings.size() ||
        j >= results->result.rankings[i].size()) {
        return 0.0;
    }
    return results->result.rankings[i].entries[j].score;
}

void
sidr_results_free(sidr_results* results) {
    delete results;
}

// ---- evaluation

sidr_status
sidr_eval_topk(const sidr_results* results,
               const sidr_queries* queries,
               const sidr_corpus* corpus,
               size_t k,
               double* accuracy) {
    return guard([&] {
        need(results, "results");
        need(queries, "queries");
        need(corpus, "corpus");
        need(accuracy, "accuracy");
        *accuracy = sidr::topk_accuracy(results->result, queries->queries, corpus->corpus, k);
    });
}

sidr_status
sidr_eval_mrr10(const sidr_results* results,
                const char* qrels_path,
                double* value,
                size_t* evaluated,
                size_t* skipped) {
    return guard([&] {
        need(results, "results");
        need(qrels_path, "qrels_path");
        need(value, "value");
        auto m = sidr::mrr_at_10(results->result, sidr::load_qrels(qrels_path));
        *value = m.value;
        if (evaluated != nullptr) {
            *evaluated = m.evaluated;
        }
        if (skipped != nullptr) {
            *skipped = m.skipped;
        }
    });
}

sidr_status
sidr_eval_ndcg10(const sidr_results* results,
                 const char* qrels_path,
                 int linear_gain,
                 double* value,
                 size_t* evaluated,
                 size_t* skipped) {
    return guard([&] {
        need(results, "results");
        need(qrels_path, "qrels_path");
        need(value, "value");
        auto m = sidr::ndcg_at_10(results->result, sidr::load_qrels(qrels_path),
                                  linear_gain ? sidr::Gain::kLinear : sidr::Gain::kExponential);
        *value = m.value;
        if (evaluated != nullptr) {
            *evaluated = m.evaluated;
        }
        if (skipped != nullptr) {
            *skipped = m.skipped;
        }
    });
}

// ---- training

void
sidr_train_config_default(sidr_train_config* cfg) {
    if (cfg == nullptr) {
        return;
    }
    sidr::TrainConfig d;
    cfg->epochs = d.epochs;
    cfg->lr = d.lr;
    cfg->seed = d.seed;
    cfg->batch_size = d.batch_size;
    cfg->dims = d.dims;
    cfg->k_query = d.encoder.k_query;
    cfg->k_doc = d.encoder.k_doc;
    cfg->negatives = sidr::negative_source_name(d.negatives);
    cfg->mine_m = d.mine_m;
}

sidr_status
sidr_train_toy(const sidr_vocab* vocab,
               const sidr_corpus* corpus,
               const char* train_path,
               const char* heldout_path,
               const sidr_train_config* cfg,
               const char* init_params_path,
               const sidr_bot_index* bot_index,
               const char* params_out,
               const char* metrics_csv,
               double* final_heldout_top1) {
    return guard([&] {
        need(vocab, "vocab");
        need(corpus, "corpus");
        need(train_path, "train_path");
        need(cfg, "cfg");
        need(params_out, "params_out");
        sidr::TrainConfig tc;
        tc.epochs = cfg->epochs;
        tc.lr = cfg->lr;
        tc.seed = cfg->seed;
        tc.batch_size = cfg->batch_size;
        tc.dims = cfg->dims;
        tc.encoder.k_query = cfg->k_query;
        tc.encoder.k_doc = cfg->k_doc;
        tc.negatives = sidr::parse_negative_source(cfg->negatives ? cfg->negatives : "random");
        tc.mine_m = cfg->mine_m;
        sidr::TrainData data{vocab->vocab, corpus->corpus, sidr::load_train_examples(train_path),
                             {}};
        if (heldout_path != nullptr) {
            data.heldout = sidr::load_train_examples(heldout_path);
        }
        std::optional<sidr::ToyEncoderParams> init;
        if (init_params_path != nullptr) {
            init = sidr::load_toy_params(init_params_path);
        }
        auto result =
            sidr::train_toy(data, tc, std::move(init), bot_index ? &bot_index->index : nullptr);
        sidr::save_toy_params(result.params, params_out);
        if (metrics_csv != nullptr) {
            std::ostringstream s;
            sidr::write_metrics_csv(s, result.log);
            write_text(metrics_csv, s.str());
        }
        if (final_heldout_top1 != nullptr) {
            *final_heldout_top1 = result.log.back().heldout_beta_top1;
        }
    });
}

// ---- synthetic data

sidr_status
sidr_generate_separable(const char* dir, uint64_t seed) {
    return guard([&] {
        need(dir, "dir");
        std::filesystem::path root(dir);
        std::filesystem::create_directories(root);
        sidr::synth::SeparableSpec spec;
        spec.seed = seed;
        auto task = sidr::synth::separable_task(spec);
        sidr::save_vocab(*task.vocab, (root / "vocab.txt").string());
        sidr::save_corpus(task.corpus, (root / "corpus.jsonl").string());
        write_text(root / "train.jsonl", examples_jsonl(task.train));
        write_text(root / "heldout.jsonl", examples_jsonl(task.heldout));
        std::vector<sidr::Query> queries;
        for (size_t i = 0; i < task.heldout.size(); ++i) {
            queries.push_back(
                {"h" + std::to_string(i), task.heldout[i].query, task.heldout[i].answers});
        }
        sidr::save_queries(queries, (root / "queries.jsonl").string());
    });
}

sidr_status
sidr_generate_random(const char* dir,
                     size_t passages,
                     size_t words,
                     size_t queries,
                     uint64_t seed) {
    return guard([&] {
        need(dir, "dir");
        std::filesystem::path root(dir);
        std::filesystem::create_directories(root);
        sidr::synth::RandomCorpusSpec spec;
        spec.passages = passages;
        spec.words = words;
        spec.queries = queries;
        spec.seed = seed;
        auto rc = sidr::synth::random_corpus(spec);
        sidr::save_vocab(*rc.vocab, (root / "vocab.txt").string());
        sidr::save_corpus(rc.corpus, (root / "corpus.jsonl").string());
        sidr::save_queries(rc.queries, (root / "queries.jsonl").string());
    });
}

// ---- benchmarking

void
sidr_bench_config_default(sidr_bench_config* cfg) {
    if (cfg == nullptr) {
        return;
    }
    sidr::BenchConfig d;
    cfg->workers = d.workers;
    cfg->topk = d.topk;
    cfg->m = d.m;
    cfg->score_param = d.score_index == sidr::ScoreIndex::kParam ? 1 : 0;
}

sidr_status
sidr_bench_stage(const char* stage,
                 const sidr_vocab* vocab,
                 const sidr_corpus* corpus,
                 const sidr_queries* queries,
                 const sidr_provider* provider,
                 const sidr_bench_config* cfg,
                 sidr_bench_report** out) {
    return guard([&] {
        need(stage, "stage");
        need(vocab, "vocab");
        need(corpus, "corpus");
        need(out, "out");
        sidr::BenchConfig bc;
        if (cfg != nullptr) {
            bc.workers = cfg->workers;
            bc.topk = cfg->topk;
            bc.m = cfg->m;
            bc.score_index = cfg->score_param ? sidr::ScoreIndex::kParam : sidr::ScoreIndex::kBot;
        }
        if (provider != nullptr && provider->toy == nullptr) {
            sidr::fail(sidr::ErrorCode::kConfig, "bench needs the toy encoder");
        }
        sidr::BenchInputs in;
        in.vocab = vocab->vocab.get();
        in.corpus = &corpus->corpus;
        if (queries != nullptr) {
            in.queries = queries->queries;
        }
        in.encoder = provider ? provider->toy : nullptr;
        auto r = std::make_unique<sidr_bench_report>();
        r->report = sidr::bench_stage(sidr::parse_bench_stage(stage), in, bc);
        *out = release(std::move(r));
    });
}

double
sidr_bench_report_mean(const sidr_bench_report* report) {
    return report ? report->report.mean : 0.0;
}

sidr_status
sidr_bench_report_json(const sidr_bench_report* report, char** out) {
    return guard([&] {
        need(report, "report");
        need(out, "out");
        *out = dup_string(sidr::report_json(report->report));
    });
}

sidr_status
sidr_bench_table_csv(const sidr_bench_report* const* reports, size_t count, char** out) {
    return guard([&] {
        need(out, "out");
        if (count > 0) {
            need(reports, "reports");
        }
        std::vector<sidr::StageReport> rs;
        for (size_t i = 0; i < count; ++i) {
            need(reports[i], "report");
            rs.push_back(reports[i]->report);
        }
        std::ostringstream s;
        sidr::write_stage_table_csv(s, rs);
        *out = dup_string(s.str());
    });
}

void
sidr_bench_report_free(sidr_bench_report* report) {
    delete report;
}

}  // extern "C"
