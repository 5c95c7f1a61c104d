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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/sparse_vec.hpp"
#include "sidr/vocab.hpp"

namespace sidr {

inline constexpr size_t kDefaultActivation = 768;

struct EncoderConfig {
    size_t k_doc = kDefaultActivation;
    size_t k_query = kDefaultActivation;
    size_t vocab_size = 0;

    void
    validate() const;
};

/// Context-free stand-in for an MLM head: token t produces logits
/// embed[t] . project over the whole vocabulary.
struct ToyEncoderParams {
    size_t vocab_size = 0;
    size_t dims = 0;
    std::vector<double> embed;    // vocab_size x dims, row-major
    std::vector<double> project;  // dims x vocab_size, row-major

    ToyEncoderParams() = default;
    ToyEncoderParams(size_t vocab_size, size_t dims);

    /// Uniform in [-0.5, 0.5] from a seeded mt19937_64.
    static ToyEncoderParams
    random(size_t vocab_size, size_t dims, uint64_t seed);

    double&
    embed_at(size_t token, size_t h) {
        return embed[token * dims + h];
    }
    double
    embed_at(size_t token, size_t h) const {
        return embed[token * dims + h];
    }
    double&
    project_at(size_t h, size_t dim) {
        return project[h * vocab_size + dim];
    }
    double
    project_at(size_t h, size_t dim) const {
        return project[h * vocab_size + dim];
    }

    size_t
    parameter_count() const {
        return embed.size() + project.size();
    }

    void
    validate() const;

    friend bool
    operator==(const ToyEncoderParams&, const ToyEncoderParams&) = default;
};

/// Per surviving dim: which token won the max-pool and its raw logit.
struct PoolSource {
    TokenId token;
    double logit;
};

struct ToyForward {
    SparseVec output;
    std::vector<PoolSource> sources;  // parallel to output.entries()
};

/// elu1p -> max-pool -> top-k, keeping what the backward pass needs.
ToyForward
toy_forward(const ToyEncoderParams& params, std::span<const TokenId> ids, size_t k);

SparseVec
toy_encode(const ToyEncoderParams& params, const TokenSeq& seq, size_t k);

/// Binary "SIDRTOY1" parameter file.
void
save_toy_params(const ToyEncoderParams& params, const std::string& path);

ToyEncoderParams
load_toy_params(const std::string& path);

/// id -> SparseVec, persisted as an "SIDREMB1" embeddings file.
class EmbeddingStore {
public:
    EmbeddingStore() = default;

    explicit EmbeddingStore(size_t vocab_size) : vocab_size_(vocab_size) {
    }

    size_t
    vocab_size() const {
        return vocab_size_;
    }

    size_t
    size() const {
        return vectors_.size();
    }

    /// Replaces any existing entry.
    void
    put(const std::string& id, SparseVec v);

    bool
    contains(const std::string& id) const {
        return vectors_.count(id) != 0;
    }

    /// Throws Error(kLookup) when absent.
    const SparseVec&
    get(const std::string& id) const;

    const std::map<std::string, SparseVec>&
    vectors() const {
        return vectors_;
    }

    std::string
    serialize() const;

    /// `max_nnz` bounds every record (0 = unchecked).
    static EmbeddingStore
    deserialize(std::string_view bytes, size_t max_nnz = 0);

    void
    save(const std::string& path) const;

    static EmbeddingStore
    load(const std::string& path, size_t max_nnz = 0);

private:
    size_t vocab_size_ = 0;
    std::map<std::string, SparseVec> vectors_;
};

/// Returns the stored vector unmodified.
const SparseVec&
file_encode(const EmbeddingStore& store, const std::string& id);

/// Keeps entries of v whose dim is in `bot`.
SparseVec
lex_mask(const SparseVec& v, const BotVec& bot);

/// Same support, unit weights.
SparseVec
binarize(const SparseVec& v);

/// Source of parametric embeddings for passages and queries. Implementations
/// are safe for concurrent calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual size_t
    vocab_size() const = 0;

    virtual SparseVec
    embed_passage(const Passage& p) const = 0;

    virtual SparseVec
    embed_query(const Query& q) const = 0;
};

class ToyProvider : public EmbeddingProvider {
public:
    ToyProvider(std::shared_ptr<const Vocabulary> vocab,
                ToyEncoderParams params,
                EncoderConfig config);

    size_t
    vocab_size() const override {
        return params_.vocab_size;
    }

    SparseVec
    embed_passage(const Passage& p) const override;

    SparseVec
    embed_query(const Query& q) const override;

    const ToyEncoderParams&
    params() const {
        return params_;
    }

    const EncoderConfig&
    config() const {
        return config_;
    }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    ToyEncoderParams params_;
    EncoderConfig config_;
};

/// Serves pre-computed vectors. Queries fall back to the passage store when no
/// query store is given.
class FileProvider : public EmbeddingProvider {
public:
    explicit FileProvider(EmbeddingStore passages,
                          std::optional<EmbeddingStore> queries = std::nullopt);

    size_t
    vocab_size() const override {
        return passages_.vocab_size();
    }

    SparseVec
    embed_passage(const Passage& p) const override;

    SparseVec
    embed_query(const Query& q) const override;

private:
    EmbeddingStore passages_;
    std::optional<EmbeddingStore> queries_;
};

}  // namespace sidr
