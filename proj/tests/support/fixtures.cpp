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

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace sidr::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    root_ = fs::temp_directory_path() /
            ("sidr-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(root_);
    fs::create_directories(root_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(root_, ec);
}

std::string
read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void
write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

std::shared_ptr<const Vocabulary>
numbered_vocab(size_t n) {
    std::vector<std::string> tokens;
    for (size_t i = 0; i < n; ++i) {
        tokens.push_back("t" + std::to_string(i));
    }
    tokens.emplace_back(kUnknownToken);
    return std::make_shared<const Vocabulary>(std::move(tokens));
}

SparseVec
random_sparse(size_t vocab_size, size_t nnz, std::mt19937_64& rng, double lo, double hi) {
    std::vector<uint32_t> dims(vocab_size);
    for (size_t i = 0; i < vocab_size; ++i) {
        dims[i] = static_cast<uint32_t>(i);
    }
    std::shuffle(dims.begin(), dims.end(), rng);
    dims.resize(std::min(nnz, vocab_size));
    std::sort(dims.begin(), dims.end());
    std::uniform_real_distribution<double> w(lo, hi);
    std::vector<SparseEntry> entries;
    for (auto d : dims) {
        entries.push_back({d, w(rng)});
    }
    return SparseVec(vocab_size, std::move(entries));
}

SearchInstance
random_search_instance(uint64_t seed, size_t max_docs, size_t max_vocab, size_t max_k) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> vocab_n(8, max_vocab - 1);
    SearchInstance s;
    const size_t words = vocab_n(rng);
    s.vocab = numbered_vocab(words);
    s.vocab_size = s.vocab->size();
    std::uniform_int_distribution<size_t> doc_n(1, max_docs);
    const size_t n = doc_n(rng);
    std::uniform_int_distribution<size_t> len(1, 24);
    // Small vocabularies and few weight levels make score ties common.
    std::uniform_int_distribution<size_t> word(0, words - 1);
    std::uniform_int_distribution<int> level(1, 4);
    std::vector<Passage> passages;
    for (size_t i = 0; i < n; ++i) {
        std::set<uint32_t> dims;
        std::string text;
        const size_t l = len(rng);
        for (size_t t = 0; t < l; ++t) {
            auto w = word(rng);
            dims.insert(static_cast<uint32_t>(w));
            text += (t ? " t" : "t") + std::to_string(w);
        }
        passages.push_back({"d" + std::to_string(i), "", text});
        s.bot.emplace_back(s.vocab_size, std::vector<TokenId>(dims.begin(), dims.end()));
        std::vector<SparseEntry> entries;
        for (auto d : dims) {
            const double raw = rng() % 2 ? 0.25 * level(rng) : std::generate_canonical<double, 53>(rng) + 0.01;
            entries.push_back({d, static_cast<double>(static_cast<float>(raw))});
        }
        s.param.emplace_back(s.vocab_size, std::move(entries));
    }
    s.corpus = Corpus(std::move(passages));
    std::uniform_int_distribution<size_t> k(1, max_k);
    for (int q = 0; q < 8; ++q) {
        auto v = random_sparse(s.vocab_size, k(rng), rng);
        // Quantize some queries so equal scores appear.
        if (q % 2 == 0) {
            std::vector<SparseEntry> e = v.entries();
            for (auto& x : e) {
                x.weight = 0.5 * static_cast<double>(level(rng));
            }
            v = SparseVec(s.vocab_size, std::move(e));
        }
        s.queries.push_back(std::move(v));
    }
    return s;
}

oracle::Dense
dense(const SparseVec& v) {
    return v.to_dense();
}

oracle::Dense
dense(const BotVec& v) {
    oracle::Dense out(v.vocab_size(), 0.0);
    for (auto d : v.dims()) {
        out[d] = 1.0;
    }
    return out;
}

Corpus
make_corpus(const std::vector<std::string>& texts) {
    std::vector<Passage> passages;
    for (size_t i = 0; i < texts.size(); ++i) {
        passages.push_back({"d" + std::to_string(i), "", texts[i]});
    }
    return Corpus(std::move(passages));
}

}  // namespace sidr::testing
