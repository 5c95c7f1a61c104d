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
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sidr {

struct Passage {
    std::string id;
    std::string title;
    std::string text;
};

struct Query {
    std::string id;
    std::string text;
    std::vector<std::string> answers;
};

struct TrainExample {
    std::string query;
    std::string positive_passage_id;
    std::vector<std::string> answers;
};

/// query id -> passage id -> relevance grade.
using Qrels = std::map<std::string, std::map<std::string, int>>;

/// Indexed text of a passage: title, one space, text.
std::string
document_text(const Passage& p);

class Corpus {
public:
    Corpus() = default;

    /// Throws Error(kBuild) on a duplicate id.
    explicit Corpus(std::vector<Passage> passages);

    size_t
    size() const {
        return passages_.size();
    }

    bool
    empty() const {
        return passages_.empty();
    }

    const Passage&
    operator[](size_t ordinal) const {
        return passages_[ordinal];
    }

    const std::vector<Passage>&
    passages() const {
        return passages_;
    }

    /// Returns size() when absent.
    size_t
    ordinal_of(const std::string& id) const;

    /// FNV-1a over ids and texts, hex encoded.
    std::string
    fingerprint() const;

private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, size_t> by_id_;
};

Corpus
load_corpus(const std::string& path);

Corpus
read_corpus(std::istream& in);

/// `path` "-" reads stdin.
std::vector<Query>
load_queries(const std::string& path);

std::vector<Query>
read_queries(std::istream& in);

std::vector<TrainExample>
load_train_examples(const std::string& path);

/// TSV: query_id <tab> passage_id <tab> grade.
Qrels
load_qrels(const std::string& path);

void
save_corpus(const Corpus& corpus, const std::string& path);

void
save_queries(const std::vector<Query>& queries, const std::string& path);

uint64_t
fnv1a64(std::string_view bytes, uint64_t seed = 1469598103934665603ULL);

std::string
hex64(uint64_t value);

}  // namespace sidr
