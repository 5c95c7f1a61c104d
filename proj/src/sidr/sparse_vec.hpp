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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sidr/vocab.hpp"

namespace sidr {

struct SparseEntry {
    TokenId dim;
    double weight;

    friend bool
    operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Vocabulary-space vector in canonical form: dims strictly increasing,
/// no zero weights.
class SparseVec {
public:
    SparseVec() = default;

    explicit SparseVec(size_t vocab_size) : vocab_size_(vocab_size) {
    }

    /// Validates ordering, range and finiteness; drops zero weights.
    SparseVec(size_t vocab_size, std::vector<SparseEntry> entries);

    /// Builds from a dense array, keeping non-zero components.
    static SparseVec
    from_dense(std::span<const double> dense);

    size_t
    vocab_size() const {
        return vocab_size_;
    }

    size_t
    nnz() const {
        return entries_.size();
    }

    bool
    empty() const {
        return entries_.empty();
    }

    const std::vector<SparseEntry>&
    entries() const {
        return entries_;
    }

    /// Weight at `dim`, 0 when absent.
    double
    at(TokenId dim) const;

    std::vector<double>
    to_dense() const;

    bool
    all_positive() const;

    friend bool
    operator==(const SparseVec&, const SparseVec&) = default;

private:
    size_t vocab_size_ = 0;
    std::vector<SparseEntry> entries_;
};

/// Bag-of-tokens vector: sorted distinct dims, implicit weight 1.
class BotVec {
public:
    BotVec() = default;

    explicit BotVec(size_t vocab_size) : vocab_size_(vocab_size) {
    }

    /// `dims` must be strictly increasing and < vocab_size.
    BotVec(size_t vocab_size, std::vector<TokenId> dims);

    size_t
    vocab_size() const {
        return vocab_size_;
    }

    size_t
    nnz() const {
        return dims_.size();
    }

    const std::vector<TokenId>&
    dims() const {
        return dims_;
    }

    bool
    contains(TokenId dim) const;

    friend bool
    operator==(const BotVec&, const BotVec&) = default;

private:
    size_t vocab_size_ = 0;
    std::vector<TokenId> dims_;
};

/// x + 1 for x >= 0, e^x otherwise.
double
elu1p(double x);

double
elu1p_grad(double x);

BotVec
bot_encode(const TokenSeq& seq, size_t vocab_size);

BotVec
bot_encode(std::span<const TokenId> ids, size_t vocab_size);

SparseVec
as_sparse(const BotVec& bot);

SparseVec
maxpool(std::span<const SparseVec> vectors);

/// Keeps the k largest weights; ties keep the lower dim.
SparseVec
topk_sparsify(const SparseVec& v, size_t k);

double
dot(const SparseVec& a, const SparseVec& b);

double
dot_bot(const SparseVec& a, const BotVec& b);

/// Rounds every weight through float, the precision index files persist.
SparseVec
to_storage_precision(const SparseVec& v);

}  // namespace sidr
