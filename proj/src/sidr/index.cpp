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

#include "sidr/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "sidr/binary_io.hpp"
#include "sidr/error.hpp"
#include "sidr/parallel.hpp"

namespace sidr {

namespace {

constexpr std::string_view kBotMagic = "SIDRBOT1";
constexpr std::string_view kParMagic = "SIDRPAR1";

template <typename Dims>
Postings
make_postings(size_t vocab_size, size_t count, Dims&& dims_of, bool weighted) {
    Postings p;
    p.offsets.assign(vocab_size + 1, 0);
    for (size_t ord = 0; ord < count; ++ord) {
        dims_of(ord, [&](TokenId dim, double) { ++p.offsets[dim + 1]; });
    }
    for (size_t d = 0; d < vocab_size; ++d) {
        p.offsets[d + 1] += p.offsets[d];
    }
    p.ordinals.resize(p.offsets[vocab_size]);
    if (weighted) {
        p.weights.resize(p.offsets[vocab_size]);
    }
    std::vector<uint64_t> cursor(p.offsets.begin(), p.offsets.end() - 1);
    for (size_t ord = 0; ord < count; ++ord) {
        dims_of(ord, [&](TokenId dim, double w) {
            auto slot = cursor[dim]++;
            p.ordinals[slot] = static_cast<uint32_t>(ord);
            if (weighted) {
                p.weights[slot] = static_cast<float>(w);
            }
        });
    }
    return p;
}

/// Accumulates query weights over postings in ascending query-dim order, the
/// same order a dense sum over dims would visit them.
RankedList
score_postings(const Postings& postings,
               size_t vocab_size,
               const std::vector<std::string>& ids,
               const SparseVec& q,
               size_t topk,
               const SearchOptions& opts) {
    require(q.vocab_size() == vocab_size,
            "search: query vocab_size " + std::to_string(q.vocab_size()) +
                " does not match index vocab_size " + std::to_string(vocab_size));
    const size_t n = ids.size();
    std::vector<double> acc(n, 0.0);
    std::vector<uint8_t> touched(n, 0);
    std::vector<uint32_t> cand;
    const bool weighted = !postings.weights.empty();
    for (const auto& e : q.entries()) {
        for (auto slot = postings.offsets[e.dim]; slot < postings.offsets[e.dim + 1]; ++slot) {
            uint32_t ord = postings.ordinals[slot];
            if (weighted) {
                acc[ord] += e.weight * static_cast<double>(postings.weights[slot]);
            } else {
                acc[ord] += e.weight;
            }
            if (!touched[ord]) {
                touched[ord] = 1;
                cand.push_back(ord);
            }
        }
    }
    if (opts.include_zeros) {
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
    return rank_candidates(cand, scores, ids, topk);
}

template <typename Index>
std::vector<RankedList>
batch_search(const Index& ix, std::span<const SparseVec> qs, size_t topk, const SearchOptions& opts) {
    std::vector<RankedList> out(qs.size());
    const size_t batch = std::max<size_t>(1, opts.batch_size);
    const size_t chunks = (qs.size() + batch - 1) / batch;
    parallel_for(chunks, opts.workers, [&](size_t c) {
        const size_t end = std::min(qs.size(), (c + 1) * batch);
        for (size_t i = c * batch; i < end; ++i) {
            out[i] = ix.search(qs[i], topk, opts);
        }
    });
    return out;
}

void
write_header(io::ByteWriter& w,
             std::string_view magic,
             size_t vocab_size,
             const std::vector<std::string>& ids) {
    w.put_bytes(magic);
    w.put<uint32_t>(kIndexFormatVersion);
    w.put<uint32_t>(static_cast<uint32_t>(vocab_size));
    w.put<uint32_t>(static_cast<uint32_t>(ids.size()));
    for (const auto& id : ids) {
        w.put_short_string(id);
    }
}

void
write_postings(io::ByteWriter& w, const Postings& p, size_t vocab_size) {
    uint32_t lists = 0;
    for (size_t d = 0; d < vocab_size; ++d) {
        lists += p.list_size(static_cast<TokenId>(d)) > 0;
    }
    w.put<uint32_t>(lists);
    for (size_t d = 0; d < vocab_size; ++d) {
        auto len = p.list_size(static_cast<TokenId>(d));
        if (len == 0) {
            continue;
        }
        w.put<uint32_t>(static_cast<uint32_t>(d));
        w.put<uint32_t>(static_cast<uint32_t>(len));
        for (auto s = p.offsets[d]; s < p.offsets[d + 1]; ++s) {
            w.put<uint32_t>(p.ordinals[s]);
        }
        if (!p.weights.empty()) {
            for (auto s = p.offsets[d]; s < p.offsets[d + 1]; ++s) {
                w.put<float>(p.weights[s]);
            }
        }
    }
}

struct ParsedIndex {
    size_t vocab_size = 0;
    std::vector<std::string> ids;
    // Per-passage (dim, weight) lists rebuilt from the postings.
    std::vector<std::vector<SparseEntry>> rows;
};

ParsedIndex
parse_index(std::string_view bytes, std::string_view magic, bool weighted) {
    io::ByteReader r(bytes, std::string(magic) + " index");
    r.expect_magic(magic);
    auto version = r.get<uint32_t>();
    if (version != kIndexFormatVersion) {
        r.corrupt("unsupported version " + std::to_string(version));
    }
    ParsedIndex out;
    out.vocab_size = r.get<uint32_t>();
    auto count = r.get<uint32_t>();
    out.ids.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        out.ids.push_back(r.get_short_string());
    }
    out.rows.resize(count);
    auto lists = r.get<uint32_t>();
    int64_t prev_dim = -1;
    std::vector<uint32_t> ords;
    for (uint32_t l = 0; l < lists; ++l) {
        auto dim = r.get<uint32_t>();
        auto len = r.get<uint32_t>();
        if (dim >= out.vocab_size || static_cast<int64_t>(dim) <= prev_dim || len == 0) {
            r.corrupt("postings lists out of order or empty");
        }
        prev_dim = dim;
        ords.resize(len);
        for (uint32_t j = 0; j < len; ++j) {
            ords[j] = r.get<uint32_t>();
            if (ords[j] >= count || (j > 0 && ords[j] <= ords[j - 1])) {
                r.corrupt("postings for dim " + std::to_string(dim) + " not ascending");
            }
        }
        for (uint32_t j = 0; j < len; ++j) {
            double w = 1.0;
            if (weighted) {
                auto f = r.get<float>();
                if (!(f > 0.0f) || !std::isfinite(f)) {
                    r.corrupt("non-positive weight in dim " + std::to_string(dim));
                }
                w = f;
            }
            out.rows[ords[j]].push_back({dim, w});
        }
    }
    r.expect_end();
    return out;
}

void
check_unique_ids(const std::vector<std::string>& ids) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            fail(ErrorCode::kBuild, "duplicate passage id '" + id + "'");
        }
    }
}

}  // namespace

RankedList
rank_candidates(std::span<const uint32_t> ordinals,
                std::span<const double> scores,
                const std::vector<std::string>& ids,
                size_t topk) {
    std::vector<size_t> order(ordinals.size());
    for (size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    auto before = [&](size_t a, size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : ordinals[a] < ordinals[b];
    };
    const size_t keep = std::min(topk, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      before);
    RankedList out;
    out.entries.reserve(keep);
    for (size_t i = 0; i < keep; ++i) {
        auto ord = ordinals[order[i]];
        out.entries.push_back({ord, ids[ord], scores[order[i]]});
    }
    return out;
}

BotIndex
BotIndex::from_vectors(size_t vocab_size, std::vector<std::string> ids, std::vector<BotVec> vectors) {
    require(ids.size() == vectors.size(), "BotIndex: ids/vectors length mismatch");
    check_unique_ids(ids);
    for (const auto& v : vectors) {
        require(v.vocab_size() == vocab_size, "BotIndex: vector vocab_size mismatch");
    }
    BotIndex ix;
    ix.vocab_size_ = vocab_size;
    ix.ids_ = std::move(ids);
    ix.vectors_ = std::move(vectors);
    ix.build_postings();
    return ix;
}

void
BotIndex::build_postings() {
    postings_ = make_postings(
        vocab_size_, vectors_.size(),
        [&](size_t ord, auto&& emit) {
            for (auto d : vectors_[ord].dims()) {
                emit(d, 1.0);
            }
        },
        false);
}

std::vector<BotVec>
BotIndex::reconstruct_from_postings() const {
    std::vector<std::vector<TokenId>> dims(ids_.size());
    for (size_t d = 0; d < vocab_size_; ++d) {
        for (auto s = postings_.offsets[d]; s < postings_.offsets[d + 1]; ++s) {
            dims[postings_.ordinals[s]].push_back(static_cast<TokenId>(d));
        }
    }
    std::vector<BotVec> out;
    out.reserve(dims.size());
    for (auto& d : dims) {
        out.emplace_back(vocab_size_, std::move(d));
    }
    return out;
}

RankedList
BotIndex::search(const SparseVec& q, size_t topk, const SearchOptions& opts) const {
    return score_postings(postings_, vocab_size_, ids_, q, topk, opts);
}

std::vector<RankedList>
BotIndex::search_batch(std::span<const SparseVec> qs, size_t topk, const SearchOptions& opts) const {
    return batch_search(*this, qs, topk, opts);
}

std::string
BotIndex::serialize() const {
    io::ByteWriter w;
    write_header(w, kBotMagic, vocab_size_, ids_);
    write_postings(w, postings_, vocab_size_);
    return w.bytes();
}

BotIndex
BotIndex::deserialize(std::string_view bytes) {
    auto parsed = parse_index(bytes, kBotMagic, false);
    std::vector<BotVec> vectors;
    vectors.reserve(parsed.rows.size());
    for (auto& row : parsed.rows) {
        std::vector<TokenId> dims;
        dims.reserve(row.size());
        for (const auto& e : row) {
            dims.push_back(e.dim);
        }
        vectors.emplace_back(parsed.vocab_size, std::move(dims));
    }
    return from_vectors(parsed.vocab_size, std::move(parsed.ids), std::move(vectors));
}

void
BotIndex::save(const std::string& path) const {
    io::write_file(path, serialize());
}

BotIndex
BotIndex::load(const std::string& path) {
    return deserialize(io::read_file(path));
}

ParamIndex
ParamIndex::from_vectors(size_t vocab_size,
                         std::vector<std::string> ids,
                         std::vector<SparseVec> vectors,
                         size_t max_nnz) {
    require(ids.size() == vectors.size(), "ParamIndex: ids/vectors length mismatch");
    check_unique_ids(ids);
    for (size_t i = 0; i < vectors.size(); ++i) {
        auto& v = vectors[i];
        if (v.vocab_size() != vocab_size) {
            fail(ErrorCode::kBuild, "passage '" + ids[i] + "': vocab_size mismatch");
        }
        if (max_nnz != 0 && v.nnz() > max_nnz) {
            fail(ErrorCode::kBuild, "passage '" + ids[i] + "': nnz " + std::to_string(v.nnz()) +
                                        " exceeds k_doc " + std::to_string(max_nnz));
        }
        if (!v.all_positive()) {
            fail(ErrorCode::kBuild, "passage '" + ids[i] + "': non-positive weight");
        }
        v = to_storage_precision(v);
    }
    ParamIndex ix;
    ix.vocab_size_ = vocab_size;
    ix.ids_ = std::move(ids);
    ix.vectors_ = std::move(vectors);
    ix.embed_calls_ = ix.ids_.size();
    ix.build_postings();
    return ix;
}

void
ParamIndex::build_postings() {
    postings_ = make_postings(
        vocab_size_, vectors_.size(),
        [&](size_t ord, auto&& emit) {
            for (const auto& e : vectors_[ord].entries()) {
                emit(e.dim, e.weight);
            }
        },
        true);
}

std::vector<SparseVec>
ParamIndex::reconstruct_from_postings() const {
    std::vector<std::vector<SparseEntry>> rows(ids_.size());
    for (size_t d = 0; d < vocab_size_; ++d) {
        for (auto s = postings_.offsets[d]; s < postings_.offsets[d + 1]; ++s) {
            rows[postings_.ordinals[s]].push_back(
                {static_cast<TokenId>(d), static_cast<double>(postings_.weights[s])});
        }
    }
    std::vector<SparseVec> out;
    out.reserve(rows.size());
    for (auto& r : rows) {
        out.emplace_back(vocab_size_, std::move(r));
    }
    return out;
}

RankedList
ParamIndex::search(const SparseVec& q, size_t topk, const SearchOptions& opts) const {
    return score_postings(postings_, vocab_size_, ids_, q, topk, opts);
}

std::vector<RankedList>
ParamIndex::search_batch(std::span<const SparseVec> qs, size_t topk, const SearchOptions& opts) const {
    return batch_search(*this, qs, topk, opts);
}

std::string
ParamIndex::serialize() const {
    io::ByteWriter w;
    write_header(w, kParMagic, vocab_size_, ids_);
    write_postings(w, postings_, vocab_size_);
    return w.bytes();
}

ParamIndex
ParamIndex::deserialize(std::string_view bytes) {
    auto parsed = parse_index(bytes, kParMagic, true);
    std::vector<SparseVec> vectors;
    vectors.reserve(parsed.rows.size());
    for (auto& row : parsed.rows) {
        vectors.emplace_back(parsed.vocab_size, std::move(row));
    }
    return from_vectors(parsed.vocab_size, std::move(parsed.ids), std::move(vectors));
}

void
ParamIndex::save(const std::string& path) const {
    io::write_file(path, serialize());
}

ParamIndex
ParamIndex::load(const std::string& path) {
    return deserialize(io::read_file(path));
}

BotIndex
build_bot_index(const Corpus& corpus, const Vocabulary& vocab) {
    std::vector<std::string> ids;
    std::vector<BotVec> vectors;
    ids.reserve(corpus.size());
    vectors.reserve(corpus.size());
    for (const auto& p : corpus.passages()) {
        ids.push_back(p.id);
        vectors.push_back(bot_encode(tokenize(vocab, document_text(p)), vocab.size()));
    }
    return BotIndex::from_vectors(vocab.size(), std::move(ids), std::move(vectors));
}

ParamIndex
build_param_index(const Corpus& corpus, const EmbeddingProvider& provider, size_t max_nnz) {
    std::vector<std::string> ids;
    std::vector<SparseVec> vectors;
    ids.reserve(corpus.size());
    vectors.reserve(corpus.size());
    size_t calls = 0;
    for (const auto& p : corpus.passages()) {
        ids.push_back(p.id);
        try {
            ++calls;
            vectors.push_back(provider.embed_passage(p));
        } catch (const Error& e) {
            fail(ErrorCode::kBuild, "embedding passage '" + p.id + "' failed: " + e.what());
        }
    }
    auto ix = ParamIndex::from_vectors(provider.vocab_size(), std::move(ids), std::move(vectors),
                                       max_nnz);
    ix.embed_calls_ = calls;
    return ix;
}

RankedList
search_bot(const BotIndex& ix, const SparseVec& q, size_t topk, const SearchOptions& opts) {
    return ix.search(q, topk, opts);
}

RankedList
search_param(const ParamIndex& ix, const SparseVec& q, size_t topk, const SearchOptions& opts) {
    return ix.search(q, topk, opts);
}

IndexKind
detect_index_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path);
    }
    char magic[8] = {};
    in.read(magic, 8);
    std::string_view m(magic, static_cast<size_t>(in.gcount()));
    if (m == kBotMagic) {
        return IndexKind::kBot;
    }
    if (m == kParMagic) {
        return IndexKind::kParam;
    }
    if (m == "SIDRB251") {
        return IndexKind::kBm25;
    }
    return IndexKind::kUnknown;
}

}  // namespace sidr
