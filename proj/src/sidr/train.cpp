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

#include "sidr/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sidr/answers.hpp"
#include "sidr/error.hpp"

namespace sidr {

namespace {

double
log_sum_exp(std::span<const double> xs) {
    double hi = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) {
        s += std::exp(x - hi);
    }
    return hi + std::log(s);
}

struct Encoded {
    ToyForward fwd;
    BotVec bot;
};

Encoded
encode_for_training(const ToyEncoderParams& params, const TokenSeq& seq, size_t k) {
    require(!seq.ids.empty(), "training text has no tokens");
    return {toy_forward(params, seq.ids, k), bot_encode(seq, params.vocab_size)};
}

/// Accumulates d loss / d params for one encoded text, given d loss / d
/// output weight for each surviving entry.
void
backprop_encoder(const ToyEncoderParams& params,
                 const ToyForward& fwd,
                 std::span<const double> grad_out,
                 ToyEncoderParams& grad) {
    const auto& entries = fwd.output.entries();
    for (size_t e = 0; e < entries.size(); ++e) {
        if (grad_out[e] == 0.0) {
            continue;
        }
        const TokenId dim = entries[e].dim;
        const auto& src = fwd.sources[e];
        const double g = grad_out[e] * elu1p_grad(src.logit);
        for (size_t h = 0; h < params.dims; ++h) {
            grad.embed_at(src.token, h) += g * params.project_at(h, dim);
            grad.project_at(h, dim) += g * params.embed_at(src.token, h);
        }
    }
}

LossBreakdown
compute_loss(const TrainBatch& batch,
             const ToyEncoderParams& params,
             const EncoderConfig& cfg,
             bool with_grad) {
    const size_t n = batch.instances.size();
    require(n >= 1, "loss_final: empty batch");
    std::vector<Encoded> qs;
    std::vector<Encoded> pool;
    qs.reserve(n);
    for (const auto& inst : batch.instances) {
        qs.push_back(encode_for_training(params, inst.query, cfg.k_query));
        pool.push_back(encode_for_training(params, inst.positive, cfg.k_doc));
    }
    for (const auto& inst : batch.instances) {
        for (const auto& neg : inst.negatives) {
            pool.push_back(encode_for_training(params, neg, cfg.k_doc));
        }
    }
    const size_t m = pool.size();

    ScoreMatrix s_para(n, m);
    ScoreMatrix s_q_bot(n, m);  // V(q) . BoT(p)
    ScoreMatrix s_bot_p(n, m);  // BoT(q) . V(p)
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            s_para.at(i, j) = dot(qs[i].fwd.output, pool[j].fwd.output);
            s_q_bot.at(i, j) = dot_bot(qs[i].fwd.output, pool[j].bot);
            s_bot_p.at(i, j) = dot_bot(pool[j].fwd.output, qs[i].bot);
        }
    }
    std::vector<size_t> positives(n);
    std::iota(positives.begin(), positives.end(), 0);

    auto para = contrastive_loss(s_para, positives);
    auto semi_a = contrastive_loss(s_q_bot, positives);
    auto semi_b = contrastive_loss(s_bot_p, positives);

    LossBreakdown out;
    out.l_para = para.loss;
    out.l_semi_para = semi_a.loss / 2.0 + semi_b.loss / 2.0;
    out.l_final = out.l_para + out.l_semi_para;
    out.grad = ToyEncoderParams(params.vocab_size, params.dims);
    if (!with_grad) {
        return out;
    }

    std::vector<double> g;
    for (size_t i = 0; i < n; ++i) {
        const auto& entries = qs[i].fwd.output.entries();
        g.assign(entries.size(), 0.0);
        for (size_t e = 0; e < entries.size(); ++e) {
            const TokenId dim = entries[e].dim;
            double acc = 0.0;
            for (size_t j = 0; j < m; ++j) {
                acc += para.grad.at(i, j) * pool[j].fwd.output.at(dim);
                if (pool[j].bot.contains(dim)) {
                    acc += semi_a.grad.at(i, j) / 2.0;
                }
            }
            g[e] = acc;
        }
        backprop_encoder(params, qs[i].fwd, g, out.grad);
    }
    for (size_t j = 0; j < m; ++j) {
        const auto& entries = pool[j].fwd.output.entries();
        g.assign(entries.size(), 0.0);
        for (size_t e = 0; e < entries.size(); ++e) {
            const TokenId dim = entries[e].dim;
            double acc = 0.0;
            for (size_t i = 0; i < n; ++i) {
                acc += para.grad.at(i, j) * qs[i].fwd.output.at(dim);
                if (qs[i].bot.contains(dim)) {
                    acc += semi_b.grad.at(i, j) / 2.0;
                }
            }
            g[e] = acc;
        }
        backprop_encoder(params, pool[j].fwd, g, out.grad);
    }
    return out;
}

uint64_t
splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint32_t
draw_answer_free(const Corpus& corpus,
                 const AnswerMatcher& matcher,
                 std::optional<uint32_t> exclude,
                 std::mt19937_64& rng) {
    std::vector<uint32_t> pool;
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (exclude && *exclude == i) {
            continue;
        }
        if (!matcher.matches(document_text(corpus[i]))) {
            pool.push_back(static_cast<uint32_t>(i));
        }
    }
    if (pool.empty()) {
        fail(ErrorCode::kMiner, "no passage in the corpus is free of the answer strings");
    }
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

}  // namespace

ContrastiveLoss
contrastive_loss(const ScoreMatrix& scores, std::span<const size_t> positives) {
    const size_t n = scores.rows;
    const size_t m = scores.cols;
    require(positives.size() == n, "contrastive_loss: one positive per row required");
    for (double v : scores.values) {
        if (!std::isfinite(v)) {
            fail(ErrorCode::kNumeric, "contrastive_loss: non-finite score");
        }
    }
    ContrastiveLoss out;
    out.grad = ScoreMatrix(n, m);
    std::vector<double> buf;
    for (size_t i = 0; i < n; ++i) {
        const size_t pos = positives[i];
        require(pos < m, "contrastive_loss: positive index out of range");

        // query -> passages: row i over every pool column
        std::span<const double> row(&scores.values[i * m], m);
        const double lse_row = log_sum_exp(row);
        out.loss -= row[pos] - lse_row;
        for (size_t j = 0; j < m; ++j) {
            out.grad.at(i, j) += std::exp(row[j] - lse_row);
        }
        out.grad.at(i, pos) -= 1.0;

        // passage -> queries: column pos over the batch's queries
        buf.resize(n);
        for (size_t k = 0; k < n; ++k) {
            buf[k] = scores.at(k, pos);
        }
        const double lse_col = log_sum_exp(buf);
        out.loss -= buf[i] - lse_col;
        for (size_t k = 0; k < n; ++k) {
            out.grad.at(k, pos) += std::exp(buf[k] - lse_col);
        }
        out.grad.at(i, pos) -= 1.0;
    }
    return out;
}

LossBreakdown
loss_final(const TrainBatch& batch, const ToyEncoderParams& params, const EncoderConfig& cfg) {
    return compute_loss(batch, params, cfg, true);
}

LossBreakdown
loss_final_value(const TrainBatch& batch, const ToyEncoderParams& params, const EncoderConfig& cfg) {
    return compute_loss(batch, params, cfg, false);
}

double
stability_margin(const ToyEncoderParams& params, std::span<const TokenId> ids, size_t k) {
    require(!ids.empty(), "stability_margin: empty token sequence");
    const size_t vocab = params.vocab_size;
    std::vector<TokenId> tokens(ids.begin(), ids.end());
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(vocab, -inf);
    std::vector<double> second(vocab, -inf);
    for (TokenId t : tokens) {
        for (size_t d = 0; d < vocab; ++d) {
            double logit = 0.0;
            for (size_t h = 0; h < params.dims; ++h) {
                logit += params.embed_at(t, h) * params.project_at(h, d);
            }
            double act = elu1p(logit);
            if (act > best[d]) {
                second[d] = best[d];
                best[d] = act;
            } else if (act > second[d]) {
                second[d] = act;
            }
        }
    }
    double margin = inf;
    std::vector<size_t> order(vocab);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return best[a] != best[b] ? best[a] > best[b] : a < b;
    });
    const size_t kept = std::min(k, vocab);
    if (kept < vocab) {
        margin = std::min(margin, best[order[kept - 1]] - best[order[kept]]);
    }
    if (tokens.size() > 1) {
        for (size_t r = 0; r < kept; ++r) {
            margin = std::min(margin, best[order[r]] - second[order[r]]);
        }
    }
    return margin;
}

void
MinerConfig::validate() const {
    if (m < 1) {
        fail(ErrorCode::kConfig, "miner: m must be >= 1");
    }
}

MinedNegative
mine_negative(const SparseVec& query_vec,
              std::span<const std::string> answers,
              const BotIndex& ix,
              const Corpus& corpus,
              const MinerConfig& cfg,
              std::optional<uint32_t> exclude) {
    cfg.validate();
    AnswerMatcher matcher(answers);
    if (matcher.empty()) {
        fail(ErrorCode::kInput, "mine_negative: query carries no usable answer string");
    }
    if (corpus.size() != ix.size()) {
        fail(ErrorCode::kConfig, "mine_negative: corpus and index sizes differ");
    }
    std::mt19937_64 rng(cfg.seed);
    auto top = ix.search(query_vec, cfg.m);
    std::vector<uint32_t> negatives;
    for (const auto& h : top.entries) {
        if (exclude && *exclude == h.ordinal) {
            continue;
        }
        if (!matcher.matches(document_text(corpus[h.ordinal]))) {
            negatives.push_back(h.ordinal);
        }
    }
    if (!negatives.empty()) {
        std::uniform_int_distribution<size_t> pick(0, negatives.size() - 1);
        return {negatives[pick(rng)], false};
    }
    return {draw_answer_free(corpus, matcher, exclude, rng), true};
}

MinedNegative
mine_negative(const Query& q,
              const ToyProvider& encoder,
              const BotIndex& ix,
              const Corpus& corpus,
              const MinerConfig& cfg) {
    return mine_negative(encoder.embed_query(q), q.answers, ix, corpus, cfg);
}

const char*
negative_source_name(NegativeSource s) {
    switch (s) {
        case NegativeSource::kNone:
            return "none";
        case NegativeSource::kRandom:
            return "random";
        case NegativeSource::kBm25:
            return "bm25";
        case NegativeSource::kRetrieved:
            return "retrieved";
    }
    return "unknown";
}

NegativeSource
parse_negative_source(std::string_view name) {
    for (auto s : {NegativeSource::kNone, NegativeSource::kRandom, NegativeSource::kBm25,
                   NegativeSource::kRetrieved}) {
        if (name == negative_source_name(s)) {
            return s;
        }
    }
    fail(ErrorCode::kConfig, "unknown negative source '" + std::string(name) + "'");
}

uint64_t
mix_seed(uint64_t a, uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

double
heldout_beta_top1(const ToyEncoderParams& params,
                  const Vocabulary& vocab,
                  const EncoderConfig& cfg,
                  std::span<const TrainExample> examples,
                  const BotIndex& ix,
                  const Corpus& corpus) {
    if (examples.empty()) {
        return 0.0;
    }
    size_t hits = 0;
    for (const auto& ex : examples) {
        auto seq = tokenize(vocab, ex.query);
        if (seq.ids.empty()) {
            continue;
        }
        auto top = ix.search(toy_encode(params, seq, cfg.k_query), 1);
        if (top.entries.empty()) {
            continue;
        }
        const auto& hit = top.entries.front();
        if (hit.passage_id == ex.positive_passage_id ||
            contains_answer(document_text(corpus[hit.ordinal]), ex.answers)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(examples.size());
}

TrainResult
train_toy(const TrainData& data,
          const TrainConfig& cfg,
          std::optional<ToyEncoderParams> init,
          const BotIndex* index) {
    if (!data.vocab) {
        fail(ErrorCode::kConfig, "train: vocabulary required");
    }
    if (data.train.empty()) {
        fail(ErrorCode::kInput, "train: no training examples");
    }
    if (cfg.batch_size < 1) {
        fail(ErrorCode::kConfig, "train: batch_size must be >= 1");
    }
    const auto& vocab = *data.vocab;
    EncoderConfig enc = cfg.encoder;
    enc.vocab_size = vocab.size();
    enc.validate();

    std::optional<BotIndex> owned;
    if (index == nullptr) {
        owned = build_bot_index(data.corpus, vocab);
        index = &*owned;
    }
    if (index->size() != data.corpus.size() || index->vocab_size() != vocab.size()) {
        fail(ErrorCode::kConfig, "train: index does not match corpus/vocabulary");
    }

    TrainResult result;
    result.params = init ? std::move(*init) : ToyEncoderParams::random(vocab.size(), cfg.dims, cfg.seed);
    auto& params = result.params;
    if (params.vocab_size != vocab.size()) {
        fail(ErrorCode::kConfig, "train: initial parameters do not match the vocabulary");
    }
    params.validate();

    // Per-example tokenization, positive ordinal and answer matcher.
    struct Prepared {
        TokenSeq query;
        uint32_t positive;
        std::vector<std::string> answers;
        std::vector<uint32_t> bm25_pool;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(data.train.size());
    for (const auto& ex : data.train) {
        auto ord = data.corpus.ordinal_of(ex.positive_passage_id);
        if (ord == data.corpus.size()) {
            fail(ErrorCode::kInput, "train: unknown positive passage '" + ex.positive_passage_id + "'");
        }
        auto seq = tokenize(vocab, ex.query);
        if (seq.ids.empty()) {
            fail(ErrorCode::kInput, "train: query '" + ex.query + "' has no tokens");
        }
        prepared.push_back({std::move(seq), static_cast<uint32_t>(ord), ex.answers, {}});
    }
    std::vector<TokenSeq> passage_tokens;
    passage_tokens.reserve(data.corpus.size());
    for (const auto& p : data.corpus.passages()) {
        passage_tokens.push_back(tokenize(vocab, document_text(p)));
    }
    if (cfg.negatives == NegativeSource::kBm25) {
        auto bm25 = Bm25Index::build(data.corpus, vocab);
        for (auto& pr : prepared) {
            AnswerMatcher matcher(pr.answers);
            for (const auto& h : bm25.score(pr.query, cfg.mine_m).entries) {
                if (h.ordinal != pr.positive &&
                    !matcher.matches(document_text(data.corpus[h.ordinal]))) {
                    pr.bm25_pool.push_back(h.ordinal);
                }
            }
        }
    }

    auto pick_negative = [&](const Prepared& pr, size_t epoch, size_t ex_idx) -> uint32_t {
        std::mt19937_64 rng(mix_seed(mix_seed(cfg.seed, epoch), ex_idx));
        if (cfg.negatives == NegativeSource::kRetrieved) {
            MinerConfig mc{cfg.mine_m, rng()};
            auto qv = toy_encode(params, pr.query, enc.k_query);
            if (pr.answers.empty()) {
                // No answer strings: everything but the positive counts as negative.
                auto top = index->search(qv, cfg.mine_m);
                std::vector<uint32_t> cands;
                for (const auto& h : top.entries) {
                    if (h.ordinal != pr.positive) {
                        cands.push_back(h.ordinal);
                    }
                }
                if (!cands.empty()) {
                    std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
                    return cands[pick(rng)];
                }
            } else {
                return mine_negative(qv, pr.answers, *index, data.corpus, mc, pr.positive).ordinal;
            }
        }
        if (cfg.negatives == NegativeSource::kBm25 && !pr.bm25_pool.empty()) {
            std::uniform_int_distribution<size_t> pick(0, pr.bm25_pool.size() - 1);
            return pr.bm25_pool[pick(rng)];
        }
        AnswerMatcher matcher(pr.answers);
        std::vector<uint32_t> pool;
        for (size_t i = 0; i < data.corpus.size(); ++i) {
            if (i != pr.positive && !matcher.matches(document_text(data.corpus[i]))) {
                pool.push_back(static_cast<uint32_t>(i));
            }
        }
        if (pool.empty()) {
            fail(ErrorCode::kMiner, "train: no negative passage available");
        }
        std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        return pool[pick(rng)];
    };

    // Fills batches in shuffled order, deferring an example whose positive is
    // already in the current batch so in-batch negatives are never positives.
    auto assemble_batches = [&](const std::vector<size_t>& order) {
        std::vector<std::vector<size_t>> batches;
        std::vector<size_t> pending = order;
        while (!pending.empty()) {
            std::vector<size_t> batch;
            std::vector<size_t> rest;
            std::vector<uint32_t> used;
            for (size_t ex : pending) {
                const uint32_t pos = prepared[ex].positive;
                if (batch.size() < cfg.batch_size &&
                    std::find(used.begin(), used.end(), pos) == used.end()) {
                    batch.push_back(ex);
                    used.push_back(pos);
                } else {
                    rest.push_back(ex);
                }
            }
            batches.push_back(std::move(batch));
            pending = std::move(rest);
        }
        return batches;
    };

    auto run_epoch = [&](size_t epoch, bool update) {
        std::vector<size_t> order(prepared.size());
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, epoch + 0x5eed));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        EpochMetrics em;
        em.epoch = epoch;
        size_t batches = 0;
        for (const auto& members : assemble_batches(order)) {
            TrainBatch batch;
            for (size_t ex : members) {
                const auto& pr = prepared[ex];
                TrainInstance inst{pr.query, passage_tokens[pr.positive], {}};
                if (cfg.negatives != NegativeSource::kNone) {
                    inst.negatives.push_back(passage_tokens[pick_negative(pr, epoch, ex)]);
                }
                batch.instances.push_back(std::move(inst));
            }
            LossBreakdown lb;
            try {
                lb = update ? loss_final(batch, params, enc) : loss_final_value(batch, params, enc);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::kNumeric) {
                    fail(ErrorCode::kTraining,
                         "training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
                }
                throw;
            }
            if (!std::isfinite(lb.l_final)) {
                fail(ErrorCode::kTraining, "training diverged at epoch " + std::to_string(epoch));
            }
            em.l_para += lb.l_para;
            em.l_semi_para += lb.l_semi_para;
            em.l_final += lb.l_final;
            ++batches;
            if (update && cfg.lr != 0.0) {
                for (size_t i = 0; i < params.embed.size(); ++i) {
                    params.embed[i] -= cfg.lr * lb.grad.embed[i];
                }
                for (size_t i = 0; i < params.project.size(); ++i) {
                    params.project[i] -= cfg.lr * lb.grad.project[i];
                }
                auto finite = [](double x) { return std::isfinite(x); };
                if (!std::all_of(params.embed.begin(), params.embed.end(), finite) ||
                    !std::all_of(params.project.begin(), params.project.end(), finite)) {
                    fail(ErrorCode::kTraining,
                         "training diverged at epoch " + std::to_string(epoch));
                }
            }
        }
        em.l_para /= static_cast<double>(batches);
        em.l_semi_para /= static_cast<double>(batches);
        em.l_final /= static_cast<double>(batches);
        em.heldout_beta_top1 =
            heldout_beta_top1(params, vocab, enc, data.heldout, *index, data.corpus);
        return em;
    };

    result.log.push_back(run_epoch(0, false));
    for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        result.log.push_back(run_epoch(epoch, true));
    }
    return result;
}

void
write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> log) {
    out << "epoch,l_para,l_semi_para,l_final,heldout_beta_top1\n";
    char buf[256];
    for (const auto& m : log) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", m.epoch, m.l_para,
                      m.l_semi_para, m.l_final, m.heldout_beta_top1);
        out << buf;
    }
}

}  // namespace sidr
