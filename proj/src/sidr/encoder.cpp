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

#include "sidr/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sidr/binary_io.hpp"
#include "sidr/error.hpp"

namespace sidr {

namespace {

constexpr std::string_view kToyMagic = "SIDRTOY1";
constexpr std::string_view kEmbMagic = "SIDREMB1";

}  // namespace

void
EncoderConfig::validate() const {
    if (k_doc < 1 || k_query < 1) {
        fail(ErrorCode::kConfig, "encoder: k_doc and k_query must be >= 1");
    }
}

ToyEncoderParams::ToyEncoderParams(size_t vocab_size, size_t dims)
    : vocab_size(vocab_size),
      dims(dims),
      embed(vocab_size * dims, 0.0),
      project(dims * vocab_size, 0.0) {
}

ToyEncoderParams
ToyEncoderParams::random(size_t vocab_size, size_t dims, uint64_t seed) {
    ToyEncoderParams p(vocab_size, dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (auto& x : p.embed) {
        x = uni(rng);
    }
    for (auto& x : p.project) {
        x = uni(rng);
    }
    return p;
}

void
ToyEncoderParams::validate() const {
    if (dims < 1 || vocab_size < 1) {
        fail(ErrorCode::kConfig, "toy encoder: dims and vocab_size must be >= 1");
    }
    if (embed.size() != vocab_size * dims || project.size() != dims * vocab_size) {
        fail(ErrorCode::kFormat, "toy encoder: parameter shape mismatch");
    }
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(embed.begin(), embed.end(), finite) ||
        !std::all_of(project.begin(), project.end(), finite)) {
        fail(ErrorCode::kNumeric, "toy encoder: non-finite parameter");
    }
}

ToyForward
toy_forward(const ToyEncoderParams& params, std::span<const TokenId> ids, size_t k) {
    require(!ids.empty(), "toy_encode: empty token sequence");
    const size_t vocab = params.vocab_size;
    std::vector<TokenId> tokens(ids.begin(), ids.end());
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

    std::vector<double> pooled(vocab, 0.0);
    std::vector<PoolSource> source(vocab, PoolSource{0, 0.0});
    std::vector<double> logits(vocab);
    bool first = true;
    for (TokenId t : tokens) {
        require(t < vocab, "toy_encode: token id out of range");
        std::fill(logits.begin(), logits.end(), 0.0);
        for (size_t h = 0; h < params.dims; ++h) {
            const double e = params.embed_at(t, h);
            const double* row = &params.project[h * vocab];
            for (size_t d = 0; d < vocab; ++d) {
                logits[d] += e * row[d];
            }
        }
        for (size_t d = 0; d < vocab; ++d) {
            double act = elu1p(logits[d]);
            if (first || act > pooled[d]) {
                pooled[d] = act;
                source[d] = {t, logits[d]};
            }
        }
        first = false;
    }

    ToyForward fwd;
    fwd.output = topk_sparsify(SparseVec::from_dense(pooled), k);
    fwd.sources.reserve(fwd.output.nnz());
    for (const auto& e : fwd.output.entries()) {
        fwd.sources.push_back(source[e.dim]);
    }
    return fwd;
}

SparseVec
toy_encode(const ToyEncoderParams& params, const TokenSeq& seq, size_t k) {
    return toy_forward(params, seq.ids, k).output;
}

void
save_toy_params(const ToyEncoderParams& params, const std::string& path) {
    params.validate();
    io::ByteWriter w;
    w.put_bytes(kToyMagic);
    w.put<uint32_t>(static_cast<uint32_t>(params.vocab_size));
    w.put<uint32_t>(static_cast<uint32_t>(params.dims));
    for (double x : params.embed) {
        w.put<double>(x);
    }
    for (double x : params.project) {
        w.put<double>(x);
    }
    io::write_file(path, w.bytes());
}

ToyEncoderParams
load_toy_params(const std::string& path) {
    auto bytes = io::read_file(path);
    io::ByteReader r(bytes, path);
    r.expect_magic(kToyMagic);
    auto vocab = r.get<uint32_t>();
    auto dims = r.get<uint32_t>();
    if (vocab == 0 || dims == 0) {
        r.corrupt("zero-sized toy encoder");
    }
    ToyEncoderParams p(vocab, dims);
    for (auto& x : p.embed) {
        x = r.get<double>();
    }
    for (auto& x : p.project) {
        x = r.get<double>();
    }
    r.expect_end();
    p.validate();
    return p;
}

void
EmbeddingStore::put(const std::string& id, SparseVec v) {
    require(v.vocab_size() == vocab_size_, "EmbeddingStore: vocab_size mismatch for '" + id + "'");
    vectors_[id] = std::move(v);
}

const SparseVec&
EmbeddingStore::get(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) {
        fail(ErrorCode::kLookup, "no embedding for id '" + id + "'");
    }
    return it->second;
}

std::string
EmbeddingStore::serialize() const {
    io::ByteWriter w;
    w.put_bytes(kEmbMagic);
    w.put<uint32_t>(static_cast<uint32_t>(vocab_size_));
    w.put<uint32_t>(static_cast<uint32_t>(vectors_.size()));
    for (const auto& [id, v] : vectors_) {
        w.put_short_string(id);
        w.put<uint32_t>(static_cast<uint32_t>(v.nnz()));
        for (const auto& e : v.entries()) {
            w.put<uint32_t>(e.dim);
            w.put<float>(static_cast<float>(e.weight));
        }
    }
    return w.bytes();
}

EmbeddingStore
EmbeddingStore::deserialize(std::string_view bytes, size_t max_nnz) {
    io::ByteReader r(bytes, "embeddings file");
    r.expect_magic(kEmbMagic);
    EmbeddingStore store(r.get<uint32_t>());
    auto count = r.get<uint32_t>();
    for (uint32_t i = 0; i < count; ++i) {
        auto id = r.get_short_string();
        auto nnz = r.get<uint32_t>();
        if (max_nnz != 0 && nnz > max_nnz) {
            r.corrupt("record '" + id + "' has nnz " + std::to_string(nnz) + " > " +
                      std::to_string(max_nnz));
        }
        std::vector<SparseEntry> entries;
        entries.reserve(nnz);
        for (uint32_t j = 0; j < nnz; ++j) {
            auto dim = r.get<uint32_t>();
            auto weight = r.get<float>();
            if (dim >= store.vocab_size_ || (j > 0 && dim <= entries.back().dim)) {
                r.corrupt("record '" + id + "' has unsorted or out-of-range dims");
            }
            entries.push_back({dim, static_cast<double>(weight)});
        }
        if (store.contains(id)) {
            r.corrupt("duplicate id '" + id + "'");
        }
        store.vectors_.emplace(std::move(id), SparseVec(store.vocab_size_, std::move(entries)));
    }
    r.expect_end();
    return store;
}

void
EmbeddingStore::save(const std::string& path) const {
    io::write_file(path, serialize());
}

EmbeddingStore
EmbeddingStore::load(const std::string& path, size_t max_nnz) {
    auto bytes = io::read_file(path);
    return deserialize(bytes, max_nnz);
}

const SparseVec&
file_encode(const EmbeddingStore& store, const std::string& id) {
    return store.get(id);
}

SparseVec
lex_mask(const SparseVec& v, const BotVec& bot) {
    require(v.vocab_size() == bot.vocab_size(), "lex_mask: vocab_size mismatch");
    std::vector<SparseEntry> kept;
    for (const auto& e : v.entries()) {
        if (bot.contains(e.dim)) {
            kept.push_back(e);
        }
    }
    return SparseVec(v.vocab_size(), std::move(kept));
}

SparseVec
binarize(const SparseVec& v) {
    std::vector<SparseEntry> entries = v.entries();
    for (auto& e : entries) {
        e.weight = 1.0;
    }
    return SparseVec(v.vocab_size(), std::move(entries));
}

ToyProvider::ToyProvider(std::shared_ptr<const Vocabulary> vocab,
                         ToyEncoderParams params,
                         EncoderConfig config)
    : vocab_(std::move(vocab)), params_(std::move(params)), config_(config) {
    params_.validate();
    config_.vocab_size = params_.vocab_size;
    config_.validate();
    if (vocab_->size() != params_.vocab_size) {
        fail(ErrorCode::kConfig, "toy encoder vocab_size " + std::to_string(params_.vocab_size) +
                                     " does not match vocabulary size " +
                                     std::to_string(vocab_->size()));
    }
}

SparseVec
ToyProvider::embed_passage(const Passage& p) const {
    auto seq = tokenize(*vocab_, document_text(p));
    if (seq.ids.empty()) {
        fail(ErrorCode::kInput, "passage '" + p.id + "' has no tokens to embed");
    }
    return toy_encode(params_, seq, config_.k_doc);
}

SparseVec
ToyProvider::embed_query(const Query& q) const {
    auto seq = tokenize(*vocab_, q.text);
    if (seq.ids.empty()) {
        fail(ErrorCode::kInput, "query '" + q.id + "' has no tokens to embed");
    }
    return toy_encode(params_, seq, config_.k_query);
}

FileProvider::FileProvider(EmbeddingStore passages, std::optional<EmbeddingStore> queries)
    : passages_(std::move(passages)), queries_(std::move(queries)) {
    if (queries_ && queries_->vocab_size() != passages_.vocab_size()) {
        fail(ErrorCode::kConfig, "query and passage embedding stores disagree on vocab_size");
    }
}

SparseVec
FileProvider::embed_passage(const Passage& p) const {
    return file_encode(passages_, p.id);
}

SparseVec
FileProvider::embed_query(const Query& q) const {
    return file_encode(queries_ ? *queries_ : passages_, q.id);
}

}  // namespace sidr
