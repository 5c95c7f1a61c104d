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

#include "sidr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "sidr/error.hpp"

namespace sidr::synth {

namespace {

std::string
word(size_t i) {
    return "w" + std::to_string(i);
}

}  // namespace

RandomCorpus
random_corpus(const RandomCorpusSpec& spec) {
    require(spec.words >= 1 && spec.min_tokens >= 1 && spec.min_tokens <= spec.max_tokens,
            "random_corpus: bad spec");
    std::vector<std::string> tokens;
    tokens.reserve(spec.words + 1);
    for (size_t i = 0; i < spec.words; ++i) {
        tokens.push_back(word(i));
    }
    tokens.emplace_back(kUnknownToken);

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<size_t> len(spec.min_tokens, spec.max_tokens);
    auto draw_word = [&] {
        auto i = static_cast<size_t>(std::pow(uni(rng), 2.0) * static_cast<double>(spec.words));
        return std::min(i, spec.words - 1);
    };

    std::vector<Passage> passages;
    passages.reserve(spec.passages);
    for (size_t p = 0; p < spec.passages; ++p) {
        std::string title = word(draw_word());
        std::string text;
        const size_t n = len(rng);
        for (size_t t = 0; t < n; ++t) {
            if (t > 0) {
                text.push_back(' ');
            }
            text += word(draw_word());
        }
        passages.push_back({"p" + std::to_string(p), std::move(title), std::move(text)});
    }

    RandomCorpus out;
    out.vocab = std::make_shared<const Vocabulary>(std::move(tokens));
    std::uniform_int_distribution<size_t> pick_passage(0, spec.passages == 0 ? 0 : spec.passages - 1);
    for (size_t q = 0; q < spec.queries; ++q) {
        std::string text;
        for (size_t t = 0; t < spec.query_tokens; ++t) {
            if (t > 0) {
                text.push_back(' ');
            }
            text += word(draw_word());
        }
        std::vector<std::string> answers;
        if (!passages.empty()) {
            const auto& src = passages[pick_passage(rng)].text;
            auto first_space = src.find(' ');
            answers.push_back(src.substr(0, first_space));
        }
        out.queries.push_back({"q" + std::to_string(q), std::move(text), std::move(answers)});
    }
    out.corpus = Corpus(std::move(passages));
    return out;
}

SeparableTask
separable_task(const SeparableSpec& spec) {
    require(spec.query_words >= 2 && spec.noise_words >= 1 && spec.passages_per_topic >= 1,
            "separable_task: bad spec");
    std::mt19937_64 rng(spec.seed);
    auto qword = [](size_t c, size_t j) { return "q" + std::to_string(c) + "x" + std::to_string(j); };
    auto pword = [](size_t c, size_t j) { return "p" + std::to_string(c) + "x" + std::to_string(j); };
    auto answer = [](size_t c) { return "a" + std::to_string(c) + "z"; };
    auto noise = [](size_t j) { return "n" + std::to_string(j) + "z"; };

    std::vector<std::string> tokens;
    for (size_t c = 0; c < spec.topics; ++c) {
        for (size_t j = 0; j < spec.query_words; ++j) {
            tokens.push_back(qword(c, j));
        }
        for (size_t j = 0; j < spec.passage_words; ++j) {
            tokens.push_back(pword(c, j));
        }
        tokens.push_back(answer(c));
    }
    for (size_t j = 0; j < spec.noise_words; ++j) {
        tokens.push_back(noise(j));
    }
    tokens.emplace_back(kUnknownToken);

    std::uniform_int_distribution<size_t> pick_noise(0, spec.noise_words - 1);
    std::vector<Passage> passages;
    // Noise passages first, so ties under an untrained encoder favour them.
    for (size_t i = 0; i < spec.noise_passages; ++i) {
        std::string text;
        for (size_t t = 0; t < 5; ++t) {
            text += (t ? " " : "") + noise(pick_noise(rng));
        }
        passages.push_back({"noise" + std::to_string(i), "", std::move(text)});
    }
    for (size_t c = 0; c < spec.topics; ++c) {
        for (size_t k = 0; k < spec.passages_per_topic; ++k) {
            std::string text;
            for (size_t j = 0; j < spec.passage_words; ++j) {
                text += pword(c, j) + " ";
            }
            text += answer(c);
            for (size_t t = 0; t < 3; ++t) {
                text += " " + noise(pick_noise(rng));
            }
            passages.push_back(
                {"t" + std::to_string(c) + "p" + std::to_string(k), "", std::move(text)});
        }
    }

    SeparableTask task;
    task.vocab = std::make_shared<const Vocabulary>(std::move(tokens));
    for (size_t c = 0; c < spec.topics; ++c) {
        // Every (word pair, noise word) combination, shuffled, split train/heldout.
        std::vector<std::string> combos;
        for (size_t a = 0; a < spec.query_words; ++a) {
            for (size_t b = a + 1; b < spec.query_words; ++b) {
                if (!spec.noisy_queries) {
                    combos.push_back(qword(c, a) + " " + qword(c, b));
                    continue;
                }
                for (size_t n = 0; n < spec.noise_words; ++n) {
                    combos.push_back(qword(c, a) + " " + qword(c, b) + " " + noise(n));
                }
            }
        }
        std::shuffle(combos.begin(), combos.end(), rng);
        require(combos.size() >= spec.train_per_topic + spec.heldout_per_topic,
                "separable_task: not enough query combinations");
        for (size_t i = 0; i < spec.train_per_topic + spec.heldout_per_topic; ++i) {
            TrainExample ex{combos[i],
                            "t" + std::to_string(c) + "p" + std::to_string(i % spec.passages_per_topic),
                            {answer(c)}};
            (i < spec.train_per_topic ? task.train : task.heldout).push_back(std::move(ex));
        }
    }
    task.corpus = Corpus(std::move(passages));
    return task;
}

TrainConfig
separable_train_config(uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.lr = 0.005;
    cfg.seed = seed;
    cfg.batch_size = 8;
    cfg.dims = 32;
    cfg.encoder.k_query = 64;
    cfg.encoder.k_doc = 64;
    cfg.negatives = NegativeSource::kRetrieved;
    return cfg;
}

}  // namespace sidr::synth
