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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sidr/bm25.hpp"
#include "sidr/corpus.hpp"
#include "sidr/encoder.hpp"
#include "sidr/index.hpp"

namespace sidr {

/// Row-major score matrix: rows are queries, columns the batch pool.
struct ScoreMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;

    ScoreMatrix() = default;
    ScoreMatrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {
    }

    double&
    at(size_t r, size_t c) {
        return values[r * cols + c];
    }
    double
    at(size_t r, size_t c) const {
        return values[r * cols + c];
    }
};

struct ContrastiveLoss {
    double loss = 0.0;
    ScoreMatrix grad;  // d loss / d scores
};

/// Bidirectional InfoNCE over a batch:
///   -sum_i [ log softmax_row_i(S)[pos_i] + log softmax_{k<rows}(S[k][pos_i])[i] ]
/// The query-to-passage term normalizes over every pool column; the
/// passage-to-query term over the batch's queries. Throws Error(kNumeric) on
/// non-finite scores.
ContrastiveLoss
contrastive_loss(const ScoreMatrix& scores, std::span<const size_t> positives);

struct TrainInstance {
    TokenSeq query;
    TokenSeq positive;
    std::vector<TokenSeq> negatives;
};

/// Pool order: every positive (instance order), then every negative.
struct TrainBatch {
    std::vector<TrainInstance> instances;
};

struct LossBreakdown {
    double l_para = 0.0;
    double l_semi_para = 0.0;
    double l_final = 0.0;
    ToyEncoderParams grad;
};

/// l_para on (V(q), V(p)), l_semi_para as the mean of (V(q), BoT(p)) and
/// (BoT(q), V(p)), l_final their sum. Gradients pass through the entries that
/// survive top-k and through the token that won each max-pool slot.
LossBreakdown
loss_final(const TrainBatch& batch, const ToyEncoderParams& params, const EncoderConfig& cfg);

/// Forward-only variant of loss_final.
LossBreakdown
loss_final_value(const TrainBatch& batch, const ToyEncoderParams& params, const EncoderConfig& cfg);

/// Smallest gap that keeps the encoder's discrete choices stable: between the
/// k-th and (k+1)-th pooled activations, and between the winning and runner-up
/// token of every surviving dim. +inf when nothing can flip.
double
stability_margin(const ToyEncoderParams& params, std::span<const TokenId> ids, size_t k);

struct MinerConfig {
    size_t m = 20;
    uint64_t seed = 0;

    void
    validate() const;
};

struct MinedNegative {
    uint32_t ordinal = 0;
    bool from_fallback = false;
};

/// Beta-searches the top-m with `query_vec`, keeps passages that contain no
/// answer and picks one uniformly. Without any such candidate it draws
/// uniformly from the whole corpus' answer-free passages. `exclude` (when set)
/// is never returned. Throws Error(kInput) without usable answers and
/// Error(kMiner) when no answer-free passage exists.
MinedNegative
mine_negative(const SparseVec& query_vec,
              std::span<const std::string> answers,
              const BotIndex& ix,
              const Corpus& corpus,
              const MinerConfig& cfg,
              std::optional<uint32_t> exclude = std::nullopt);

/// Encodes `q` with the toy provider's query side first.
MinedNegative
mine_negative(const Query& q,
              const ToyProvider& encoder,
              const BotIndex& ix,
              const Corpus& corpus,
              const MinerConfig& cfg);

enum class NegativeSource {
    kNone,       // in-batch negatives only
    kRandom,     // a random answer-free passage
    kBm25,       // drawn from static BM25 top-m answer-free passages
    kRetrieved,  // mined with beta search under the current parameters
};

const char*
negative_source_name(NegativeSource s);

NegativeSource
parse_negative_source(std::string_view name);

struct TrainConfig {
    size_t epochs = 10;
    double lr = 0.05;
    uint64_t seed = 0;
    size_t batch_size = 8;
    size_t dims = 16;
    EncoderConfig encoder;
    NegativeSource negatives = NegativeSource::kRandom;
    /// Pool size for retrieved and BM25 negatives; its seed is derived per call.
    size_t mine_m = 20;
};

struct TrainData {
    std::shared_ptr<const Vocabulary> vocab;
    Corpus corpus;
    std::vector<TrainExample> train;
    std::vector<TrainExample> heldout;
};

struct EpochMetrics {
    size_t epoch = 0;
    double l_para = 0.0;
    double l_semi_para = 0.0;
    double l_final = 0.0;
    double heldout_beta_top1 = 0.0;
};

struct TrainResult {
    ToyEncoderParams params;
    /// Row 0 is the untrained model (losses averaged without updates).
    std::vector<EpochMetrics> log;
};

/// Plain gradient descent on l_final. `index` is the fixed bag-of-tokens index
/// used for mining and held-out evaluation; it is built from the corpus when
/// null. Throws Error(kTraining) naming the epoch on a non-finite loss.
TrainResult
train_toy(const TrainData& data,
          const TrainConfig& cfg,
          std::optional<ToyEncoderParams> init = std::nullopt,
          const BotIndex* index = nullptr);

/// Fraction of examples whose beta-search top-1 is the positive passage or
/// contains an answer.
double
heldout_beta_top1(const ToyEncoderParams& params,
                  const Vocabulary& vocab,
                  const EncoderConfig& cfg,
                  std::span<const TrainExample> examples,
                  const BotIndex& ix,
                  const Corpus& corpus);

/// epoch,l_para,l_semi_para,l_final,heldout_beta_top1
void
write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> log);

uint64_t
mix_seed(uint64_t a, uint64_t b);

}  // namespace sidr
