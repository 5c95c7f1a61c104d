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
#include <string>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/index.hpp"
#include "sidr/vocab.hpp"

namespace sidr {

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
    /// Count repeated query terms with multiplicity instead of once.
    bool query_tf = false;
};

/// Term-frequency index scored with Okapi BM25 and a Lucene-style idf.
class Bm25Index {
public:
    Bm25Index() = default;

    /// Throws Error(kBuild) for an empty corpus.
    static Bm25Index
    build(const Corpus& corpus, const Vocabulary& vocab, Bm25Params params = {});

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

    const Bm25Params&
    params() const {
        return params_;
    }

    void
    set_params(const Bm25Params& params) {
        params_ = params;
    }

    const std::vector<uint32_t>&
    doc_lengths() const {
        return doc_lengths_;
    }

    double
    avg_doc_length() const {
        return avg_doc_length_;
    }

    uint32_t
    doc_frequency(TokenId dim) const;

    /// Term frequency of `dim` in passage `ordinal`.
    uint32_t
    term_frequency(TokenId dim, uint32_t ordinal) const;

    /// ln(1 + (N - df + 0.5) / (df + 0.5)).
    double
    idf(TokenId dim) const;

    RankedList
    score(const TokenSeq& q, size_t topk, bool include_zeros = false) const;

    std::string
    serialize() const;

    static Bm25Index
    deserialize(std::string_view bytes);

    void
    save(const std::string& path) const;

    static Bm25Index
    load(const std::string& path);

private:
    size_t vocab_size_ = 0;
    std::vector<std::string> ids_;
    std::vector<uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
    std::vector<uint64_t> offsets_;  // vocab_size + 1
    std::vector<uint32_t> ordinals_;
    std::vector<uint32_t> tfs_;
};

inline Bm25Index
build_bm25(const Corpus& corpus, const Vocabulary& vocab, double k1 = 0.9, double b = 0.4) {
    return Bm25Index::build(corpus, vocab, {k1, b, false});
}

inline RankedList
score_bm25(const Bm25Index& ix, const TokenSeq& q, size_t topk) {
    return ix.score(q, topk);
}

}  // namespace sidr
