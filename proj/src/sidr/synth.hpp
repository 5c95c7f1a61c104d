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
#include <memory>
#include <vector>

#include "sidr/corpus.hpp"
#include "sidr/train.hpp"
#include "sidr/vocab.hpp"

namespace sidr::synth {

/// Generated corpus over words "w0".."w{n-1}" drawn with a skewed (roughly
/// Zipfian) distribution. Queries carry one answer word taken from a passage.
struct RandomCorpusSpec {
    size_t passages = 1000;
    size_t words = 256;  // vocabulary size is words + 1 ([UNK])
    size_t min_tokens = 8;
    size_t max_tokens = 32;
    size_t queries = 0;
    size_t query_tokens = 4;
    uint64_t seed = 0;
};

struct RandomCorpus {
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<Query> queries;
};

RandomCorpus
random_corpus(const RandomCorpusSpec& spec);

/// A retrieval task with an exact solution: every topic owns query-only words
/// and passage-only words, so bag-of-tokens overlap between a query and its
/// passages is limited to shared noise words and the encoder has to learn
/// the expansion from query words to passage words.
struct SeparableTask {
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<TrainExample> train;
    std::vector<TrainExample> heldout;
};

struct SeparableSpec {
    size_t topics = 20;
    size_t query_words = 2;    // per topic; each query uses two of them
    size_t passage_words = 3;  // per topic
    size_t passages_per_topic = 1;
    size_t noise_words = 10;
    bool noisy_queries = true;  // append one noise word to every query
    size_t noise_passages = 20;
    size_t train_per_topic = 4;
    size_t heldout_per_topic = 2;
    uint64_t seed = 0;
};

SeparableTask
separable_task(const SeparableSpec& spec);

/// Training settings tuned for the default separable task. The sparse support
/// (k = 64) is wide enough that topic dims enter the top-k early; lr is lower
/// than the library default to stay stable at that width.
TrainConfig
separable_train_config(uint64_t seed);

}  // namespace sidr::synth
