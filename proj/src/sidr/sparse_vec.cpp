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

#include "sidr/sparse_vec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sidr/error.hpp"

namespace sidr {

SparseVec::SparseVec(size_t vocab_size, std::vector<SparseEntry> entries)
    : vocab_size_(vocab_size) {
    entries_.reserve(entries.size());
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        require(e.dim < vocab_size,
                "SparseVec: dim " + std::to_string(e.dim) + " out of range " +
                    std::to_string(vocab_size));
        require(i == 0 || entries[i - 1].dim < e.dim, "SparseVec: dims not strictly increasing");
        if (!std::isfinite(e.weight)) {
            fail(ErrorCode::kNumeric, "SparseVec: non-finite weight at dim " + std::to_string(e.dim));
        }
        if (e.weight != 0.0) {
            entries_.push_back(e);
        }
    }
}

SparseVec
SparseVec::from_dense(std::span<const double> dense) {
    std::vector<SparseEntry> entries;
    for (size_t d = 0; d < dense.size(); ++d) {
        if (dense[d] != 0.0) {
            entries.push_back({static_cast<TokenId>(d), dense[d]});
        }
    }
    return SparseVec(dense.size(), std::move(entries));
}

double
SparseVec::at(TokenId dim) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                               [](const SparseEntry& e, TokenId d) { return e.dim < d; });
    return (it != entries_.end() && it->dim == dim) ? it->weight : 0.0;
}

std::vector<double>
SparseVec::to_dense() const {
    std::vector<double> dense(vocab_size_, 0.0);
    for (const auto& e : entries_) {
        dense[e.dim] = e.weight;
    }
    return dense;
}

bool
SparseVec::all_positive() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const SparseEntry& e) { return e.weight > 0.0; });
}

BotVec::BotVec(size_t vocab_size, std::vector<TokenId> dims)
    : vocab_size_(vocab_size), dims_(std::move(dims)) {
    for (size_t i = 0; i < dims_.size(); ++i) {
        require(dims_[i] < vocab_size, "BotVec: dim out of range");
        require(i == 0 || dims_[i - 1] < dims_[i], "BotVec: dims not strictly increasing");
    }
}

bool
BotVec::contains(TokenId dim) const {
    return std::binary_search(dims_.begin(), dims_.end(), dim);
}

double
elu1p(double x) {
    return x >= 0.0 ? x + 1.0 : std::exp(x);
}

double
elu1p_grad(double x) {
    return x >= 0.0 ? 1.0 : std::exp(x);
}

BotVec
bot_encode(std::span<const TokenId> ids, size_t vocab_size) {
    std::vector<TokenId> dims(ids.begin(), ids.end());
    for (auto id : dims) {
        require(id < vocab_size, "bot_encode: token id " + std::to_string(id) + " out of range");
    }
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    return BotVec(vocab_size, std::move(dims));
}

BotVec
bot_encode(const TokenSeq& seq, size_t vocab_size) {
    return bot_encode(std::span<const TokenId>(seq.ids), vocab_size);
}

SparseVec
as_sparse(const BotVec& bot) {
    std::vector<SparseEntry> entries;
    entries.reserve(bot.nnz());
    for (auto d : bot.dims()) {
        entries.push_back({d, 1.0});
    }
    return SparseVec(bot.vocab_size(), std::move(entries));
}

SparseVec
maxpool(std::span<const SparseVec> vectors) {
    require(!vectors.empty(), "maxpool: empty input");
    size_t vocab_size = vectors.front().vocab_size();
    SparseVec acc = vectors.front();
    for (size_t i = 1; i < vectors.size(); ++i) {
        const auto& v = vectors[i];
        require(v.vocab_size() == vocab_size, "maxpool: vocab_size mismatch");
        const auto& a = acc.entries();
        const auto& b = v.entries();
        std::vector<SparseEntry> merged;
        merged.reserve(a.size() + b.size());
        size_t x = 0;
        size_t y = 0;
        // Absent dims count as 0, so a negative stored weight loses to absence.
        while (x < a.size() || y < b.size()) {
            if (y == b.size() || (x < a.size() && a[x].dim < b[y].dim)) {
                merged.push_back({a[x].dim, std::max(a[x].weight, 0.0)});
                ++x;
            } else if (x == a.size() || b[y].dim < a[x].dim) {
                merged.push_back({b[y].dim, std::max(b[y].weight, 0.0)});
                ++y;
            } else {
                merged.push_back({a[x].dim, std::max(a[x].weight, b[y].weight)});
                ++x;
                ++y;
            }
        }
        acc = SparseVec(vocab_size, std::move(merged));
    }
    return acc;
}

SparseVec
topk_sparsify(const SparseVec& v, size_t k) {
    if (v.nnz() <= k) {
        return v;
    }
    std::vector<SparseEntry> entries = v.entries();
    auto better = [](const SparseEntry& a, const SparseEntry& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.dim < b.dim;
    };
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                     entries.end(), better);
    entries.resize(k);
    std::sort(entries.begin(), entries.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.dim < b.dim; });
    return SparseVec(v.vocab_size(), std::move(entries));
}

double
dot(const SparseVec& a, const SparseVec& b) {
    require(a.vocab_size() == b.vocab_size(), "dot: vocab_size mismatch");
    const auto& x = a.entries();
    const auto& y = b.entries();
    double sum = 0.0;
    size_t i = 0;
    size_t j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].dim < y[j].dim) {
            ++i;
        } else if (y[j].dim < x[i].dim) {
            ++j;
        } else {
            sum += x[i].weight * y[j].weight;
            ++i;
            ++j;
        }
    }
    return sum;
}

double
dot_bot(const SparseVec& a, const BotVec& b) {
    require(a.vocab_size() == b.vocab_size(), "dot_bot: vocab_size mismatch");
    const auto& x = a.entries();
    const auto& y = b.dims();
    double sum = 0.0;
    size_t i = 0;
    size_t j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].dim < y[j]) {
            ++i;
        } else if (y[j] < x[i].dim) {
            ++j;
        } else {
            sum += x[i].weight;
            ++i;
            ++j;
        }
    }
    return sum;
}

SparseVec
to_storage_precision(const SparseVec& v) {
    std::vector<SparseEntry> entries = v.entries();
    for (auto& e : entries) {
        e.weight = static_cast<double>(static_cast<float>(e.weight));
    }
    return SparseVec(v.vocab_size(), std::move(entries));
}

}  // namespace sidr
