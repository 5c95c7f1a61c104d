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
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/index.hpp"
#include "sidr/sparse_vec.hpp"
#include "sidr/vocab.hpp"

namespace sidr::testing {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir&
    operator=(const TempDir&) = delete;

    std::string
    path(const std::string& name) const {
        return (root_ / name).string();
    }

    const std::filesystem::path&
    root() const {
        return root_;
    }

private:
    std::filesystem::path root_;
};

std::string
read_bytes(const std::string& path);

void
write_bytes(const std::string& path, const std::string& bytes);

/// Vocabulary "t0".."t{n-1}" followed by [UNK].
std::shared_ptr<const Vocabulary>
numbered_vocab(size_t n);

/// Random sparse vector with `nnz` distinct dims and weights in [lo, hi).
SparseVec
random_sparse(size_t vocab_size, size_t nnz, std::mt19937_64& rng, double lo = 0.05, double hi = 2.0);

/// A seeded search instance: a corpus over a numbered vocabulary, its BoT and
/// parametric vectors, and queries. Parametric passage weights are already
/// rounded to the precision the index stores.
struct SearchInstance {
    size_t vocab_size = 0;
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<BotVec> bot;
    std::vector<SparseVec> param;
    std::vector<SparseVec> queries;
};

SearchInstance
random_search_instance(uint64_t seed, size_t max_docs = 1000, size_t max_vocab = 256, size_t max_k = 64);

oracle::Dense
dense(const SparseVec& v);

oracle::Dense
dense(const BotVec& v);

/// Corpus of passages "d{i}" whose text is the given whitespace-joined words.
Corpus
make_corpus(const std::vector<std::string>& texts);

}  // namespace sidr::testing
