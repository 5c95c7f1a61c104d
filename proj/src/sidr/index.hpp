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
#include <span>
#include <string>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/sparse_vec.hpp"
#include "sidr/vocab.hpp"

namespace sidr {

inline constexpr uint32_t kIndexFormatVersion = 1;

struct Hit {
    uint32_t ordinal;
    std::string passage_id;
    double score;

    friend bool
    operator==(const Hit&, const Hit&) = default;
};

/// Descending score, ties by ascending ordinal.
struct RankedList {
    std::vector<Hit> entries;

    size_t
    size() const {
        return entries.size();
    }

    friend bool
    operator==(const RankedList&, const RankedList&) = default;
};

struct SearchOptions {
    bool include_zeros = false;
    size_t workers = 1;
    /// Queries are dispatched in chunks of this size; results do not depend on it.
    size_t batch_size = 32;
};

/// Orders candidates under the ranking rule and keeps the first `topk`.
/// `scores[i]` belongs to `ordinals[i]`.
RankedList
rank_candidates(std::span<const uint32_t> ordinals,
                std::span<const double> scores,
                const std::vector<std::string>& ids,
                size_t topk);

/// Dim-major postings in compressed-row form.
struct Postings {
    std::vector<uint64_t> offsets;  // vocab_size + 1
    std::vector<uint32_t> ordinals;
    std::vector<float> weights;  // empty for binary postings

    size_t
    list_size(TokenId dim) const {
        return offsets[dim + 1] - offsets[dim];
    }
};

/// Non-parametric bag-of-tokens index. Immutable once built.
class BotIndex {
public:
    BotIndex() = default;

    static BotIndex
    from_vectors(size_t vocab_size, std::vector<std::string> ids, std::vector<BotVec> vectors);

    size_t
    vocab_size() const {
        return vocab_size_;
    }

    size_t
    size() const {
        return ids_.size();
    }

    const std::vector<std::string>&
    ids() const {
        return ids_;
    }

    const std::vector<BotVec>&
    vectors() const {
        return vectors_;
    }

    const Postings&
    postings() const {
        return postings_;
    }

    /// Per-passage vectors rebuilt from the postings alone.
    std::vector<BotVec>
    reconstruct_from_postings() const;

    RankedList
    search(const SparseVec& q, size_t topk, const SearchOptions& opts = {}) const;

    std::vector<RankedList>
    search_batch(std::span<const SparseVec> qs, size_t topk, const SearchOptions& opts = {}) const;

    std::string
    serialize() const;

    static BotIndex
    deserialize(std::string_view bytes);

    void
    save(const std::string& path) const;

    static BotIndex
    load(const std::string& path);

    friend bool
    operator==(const BotIndex& a, const BotIndex& b) {
        return a.vocab_size_ == b.vocab_size_ && a.ids_ == b.ids_ && a.vectors_ == b.vectors_;
    }

private:
    void
    build_postings();

    size_t vocab_size_ = 0;
    std::vector<std::string> ids_;
    std::vector<BotVec> vectors_;
    Postings postings_;
};

/// Parametric index over provider embeddings. Weights are kept at the 32-bit
/// precision they persist with, so a loaded index equals the built one.
class ParamIndex {
public:
    ParamIndex() = default;

    /// Throws Error(kBuild) when a vector is not strictly positive or has more
    /// than `max_nnz` entries (0 = unchecked).
    static ParamIndex
    from_vectors(size_t vocab_size,
                 std::vector<std::string> ids,
                 std::vector<SparseVec> vectors,
                 size_t max_nnz = 0);

    size_t
    vocab_size() const {
        return vocab_size_;
    }

    size_t
    size() const {
        return ids_.size();
    }

    const std::vector<std::string>&
    ids() const {
        return ids_;
    }

    const std::vector<SparseVec>&
    vectors() const {
        return vectors_;
    }

    const Postings&
    postings() const {
        return postings_;
    }

    /// Provider invocations spent building this index.
    size_t
    embed_calls() const {
        return embed_calls_;
    }

    std::vector<SparseVec>
    reconstruct_from_postings() const;

    RankedList
    search(const SparseVec& q, size_t topk, const SearchOptions& opts = {}) const;

    std::vector<RankedList>
    search_batch(std::span<const SparseVec> qs, size_t topk, const SearchOptions& opts = {}) const;

    std::string
    serialize() const;

    static ParamIndex
    deserialize(std::string_view bytes);

    void
    save(const std::string& path) const;

    static ParamIndex
    load(const std::string& path);

    friend bool
    operator==(const ParamIndex& a, const ParamIndex& b) {
        return a.vocab_size_ == b.vocab_size_ && a.ids_ == b.ids_ && a.vectors_ == b.vectors_;
    }

private:
    friend ParamIndex
    build_param_index(const Corpus& corpus, const EmbeddingProvider& provider, size_t max_nnz);

    void
    build_postings();

    size_t vocab_size_ = 0;
    std::vector<std::string> ids_;
    std::vector<SparseVec> vectors_;
    Postings postings_;
    size_t embed_calls_ = 0;
};

/// BoT of tokenize(title + " " + text) per passage.
BotIndex
build_bot_index(const Corpus& corpus, const Vocabulary& vocab);

/// One provider call per passage; failures are rethrown as Error(kBuild)
/// naming the passage.
ParamIndex
build_param_index(const Corpus& corpus, const EmbeddingProvider& provider, size_t max_nnz);

RankedList
search_bot(const BotIndex& ix, const SparseVec& q, size_t topk, const SearchOptions& opts = {});

RankedList
search_param(const ParamIndex& ix, const SparseVec& q, size_t topk, const SearchOptions& opts = {});

enum class IndexKind { kBot, kParam, kBm25, kUnknown };

/// Sniffs the magic of an index file.
IndexKind
detect_index_kind(const std::string& path);

}  // namespace sidr
