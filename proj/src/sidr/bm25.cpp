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

#include "sidr/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sidr/binary_io.hpp"
#include "sidr/error.hpp"

namespace sidr {

namespace {

constexpr std::string_view kBm25Magic = "SIDRB251";

}  // namespace

Bm25Index
Bm25Index::build(const Corpus& corpus, const Vocabulary& vocab, Bm25Params params) {
    if (corpus.empty()) {
        fail(ErrorCode::kBuild, "bm25: empty corpus");
    }
    Bm25Index ix;
    ix.vocab_size_ = vocab.size();
    ix.params_ = params;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> lists(vocab.size());
    uint64_t total_len = 0;
    for (size_t ord = 0; ord < corpus.size(); ++ord) {
        const auto& p = corpus[ord];
        ix.ids_.push_back(p.id);
        auto seq = tokenize(vocab, document_text(p));
        ix.doc_lengths_.push_back(static_cast<uint32_t>(seq.ids.size()));
        total_len += seq.ids.size();
        std::map<TokenId, uint32_t> counts;
        for (auto id : seq.ids) {
            ++counts[id];
        }
        for (auto [dim, tf] : counts) {
            lists[dim].emplace_back(static_cast<uint32_t>(ord), tf);
        }
    }
    ix.avg_doc_length_ = static_cast<double>(total_len) / static_cast<double>(corpus.size());
    ix.offsets_.assign(vocab.size() + 1, 0);
    for (size_t d = 0; d < lists.size(); ++d) {
        ix.offsets_[d + 1] = ix.offsets_[d] + lists[d].size();
        for (auto [ord, tf] : lists[d]) {
            ix.ordinals_.push_back(ord);
            ix.tfs_.push_back(tf);
        }
    }
    return ix;
}

uint32_t
Bm25Index::doc_frequency(TokenId dim) const {
    require(dim < vocab_size_, "bm25: dim out of range");
    return static_cast<uint32_t>(offsets_[dim + 1] - offsets_[dim]);
}

uint32_t
Bm25Index::term_frequency(TokenId dim, uint32_t ordinal) const {
    require(dim < vocab_size_, "bm25: dim out of range");
    auto first = ordinals_.begin() + static_cast<std::ptrdiff_t>(offsets_[dim]);
    auto last = ordinals_.begin() + static_cast<std::ptrdiff_t>(offsets_[dim + 1]);
    auto it = std::lower_bound(first, last, ordinal);
    if (it == last || *it != ordinal) {
        return 0;
    }
    return tfs_[static_cast<size_t>(it - ordinals_.begin())];
}

double
Bm25Index::idf(TokenId dim) const {
    const double n = static_cast<double>(ids_.size());
    const double df = doc_frequency(dim);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

RankedList
Bm25Index::score(const TokenSeq& q, size_t topk, bool include_zeros) const {
    std::map<TokenId, uint32_t> terms;
    for (auto id : q.ids) {
        require(id < vocab_size_, "bm25: query token out of range");
        ++terms[id];
    }
    const size_t n = ids_.size();
    std::vector<double> acc(n, 0.0);
    std::vector<uint8_t> touched(n, 0);
    std::vector<uint32_t> cand;
    const double k1 = params_.k1;
    const double b = params_.b;
    for (auto [dim, qtf] : terms) {
        const double w = idf(dim) * (params_.query_tf ? qtf : 1.0);
        for (auto s = offsets_[dim]; s < offsets_[dim + 1]; ++s) {
            const uint32_t ord = ordinals_[s];
            const double tf = tfs_[s];
            const double norm = k1 * (1.0 - b + b * doc_lengths_[ord] / avg_doc_length_);
            acc[ord] += w * tf * (k1 + 1.0) / (tf + norm);
            if (!touched[ord]) {
                touched[ord] = 1;
                cand.push_back(ord);
            }
        }
    }
    if (include_zeros) {
        cand.resize(n);
        for (size_t i = 0; i < n; ++i) {
            cand[i] = static_cast<uint32_t>(i);
        }
    } else {
        std::erase_if(cand, [&](uint32_t ord) { return acc[ord] == 0.0; });
    }
    std::vector<double> scores(cand.size());
    for (size_t i = 0; i < cand.size(); ++i) {
        scores[i] = acc[cand[i]];
    }
    return rank_candidates(cand, scores, ids_, topk);
}

std::string
Bm25Index::serialize() const {
    io::ByteWriter w;
    w.put_bytes(kBm25Magic);
    w.put<uint32_t>(kIndexFormatVersion);
    w.put<uint32_t>(static_cast<uint32_t>(vocab_size_));
    w.put<uint32_t>(static_cast<uint32_t>(ids_.size()));
    for (const auto& id : ids_) {
        w.put_short_string(id);
    }
    for (auto len : doc_lengths_) {
        w.put<uint32_t>(len);
    }
    w.put<double>(params_.k1);
    w.put<double>(params_.b);
    uint32_t lists = 0;
    for (size_t d = 0; d < vocab_size_; ++d) {
        lists += offsets_[d + 1] > offsets_[d];
    }
    w.put<uint32_t>(lists);
    for (size_t d = 0; d < vocab_size_; ++d) {
        auto len = offsets_[d + 1] - offsets_[d];
        if (len == 0) {
            continue;
        }
        w.put<uint32_t>(static_cast<uint32_t>(d));
        w.put<uint32_t>(static_cast<uint32_t>(len));
        for (auto s = offsets_[d]; s < offsets_[d + 1]; ++s) {
            w.put<uint32_t>(ordinals_[s]);
        }
        for (auto s = offsets_[d]; s < offsets_[d + 1]; ++s) {
            w.put<uint32_t>(tfs_[s]);
        }
    }
    return w.bytes();
}

Bm25Index
Bm25Index::deserialize(std::string_view bytes) {
    io::ByteReader r(bytes, "SIDRB251 index");
    r.expect_magic(kBm25Magic);
    auto version = r.get<uint32_t>();
    if (version != kIndexFormatVersion) {
        r.corrupt("unsupported version " + std::to_string(version));
    }
    Bm25Index ix;
    ix.vocab_size_ = r.get<uint32_t>();
    auto count = r.get<uint32_t>();
    if (count == 0) {
        r.corrupt("empty corpus");
    }
    for (uint32_t i = 0; i < count; ++i) {
        ix.ids_.push_back(r.get_short_string());
    }
    uint64_t total = 0;
    for (uint32_t i = 0; i < count; ++i) {
        ix.doc_lengths_.push_back(r.get<uint32_t>());
        total += ix.doc_lengths_.back();
    }
    ix.avg_doc_length_ = static_cast<double>(total) / count;
    ix.params_.k1 = r.get<double>();
    ix.params_.b = r.get<double>();
    ix.offsets_.assign(ix.vocab_size_ + 1, 0);
    auto lists = r.get<uint32_t>();
    int64_t prev = -1;
    for (uint32_t l = 0; l < lists; ++l) {
        auto dim = r.get<uint32_t>();
        auto len = r.get<uint32_t>();
        if (dim >= ix.vocab_size_ || static_cast<int64_t>(dim) <= prev || len == 0 || len > count) {
            r.corrupt("postings lists out of order");
        }
        for (auto d = static_cast<size_t>(prev + 1); d <= dim; ++d) {
            ix.offsets_[d] = ix.ordinals_.size();
        }
        prev = dim;
        for (uint32_t j = 0; j < len; ++j) {
            auto ord = r.get<uint32_t>();
            if (ord >= count || (j > 0 && ord <= ix.ordinals_.back())) {
                r.corrupt("postings not ascending");
            }
            ix.ordinals_.push_back(ord);
        }
        for (uint32_t j = 0; j < len; ++j) {
            auto tf = r.get<uint32_t>();
            if (tf == 0) {
                r.corrupt("zero term frequency");
            }
            ix.tfs_.push_back(tf);
        }
    }
    for (auto d = static_cast<size_t>(prev + 1); d <= ix.vocab_size_; ++d) {
        ix.offsets_[d] = ix.ordinals_.size();
    }
    r.expect_end();
    return ix;
}

void
Bm25Index::save(const std::string& path) const {
    io::write_file(path, serialize());
}

Bm25Index
Bm25Index::load(const std::string& path) {
    return deserialize(io::read_file(path));
}

}  // namespace sidr
