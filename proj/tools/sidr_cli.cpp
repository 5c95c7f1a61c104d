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

// sidr command-line tool. Talks to the engine only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sidr/sidr.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Failure {
    int exit_code;
    std::string message;
};

void
check(sidr_status st, const std::string& what) {
    if (st != SIDR_OK) {
        throw Failure{sidr_exit_code(st),
                      what + ": " + sidr_status_name(st) + ": " + sidr_last_error()};
    }
}

[[noreturn]] void
usage(const std::string& message) {
    throw Failure{2, message};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void
    operator()(T* p) const {
        Free(p);
    }
};

using Vocab = std::unique_ptr<sidr_vocab, Deleter<sidr_vocab, sidr_vocab_free>>;
using CorpusH = std::unique_ptr<sidr_corpus, Deleter<sidr_corpus, sidr_corpus_free>>;
using Queries = std::unique_ptr<sidr_queries, Deleter<sidr_queries, sidr_queries_free>>;
using Provider = std::unique_ptr<sidr_provider, Deleter<sidr_provider, sidr_provider_free>>;
using BotIx = std::unique_ptr<sidr_bot_index, Deleter<sidr_bot_index, sidr_bot_index_free>>;
using ParamIx =
    std::unique_ptr<sidr_param_index, Deleter<sidr_param_index, sidr_param_index_free>>;
using Bm25Ix = std::unique_ptr<sidr_bm25_index, Deleter<sidr_bm25_index, sidr_bm25_index_free>>;
using Results = std::unique_ptr<sidr_results, Deleter<sidr_results, sidr_results_free>>;
using Report =
    std::unique_ptr<sidr_bench_report, Deleter<sidr_bench_report, sidr_bench_report_free>>;

std::string
take(char* s) {
    std::string out(s ? s : "");
    sidr_string_free(s);
    return out;
}

// Paths are relative to the work directory; "-" stays stdin/stdout.
struct Paths {
    std::string workdir;

    std::string
    operator()(const std::string& p) const {
        if (p.empty() || p == "-" || workdir.empty() || fs::path(p).is_absolute()) {
            return p;
        }
        return (fs::path(workdir) / p).string();
    }
};

Vocab
open_vocab(const std::string& path) {
    sidr_vocab* v = nullptr;
    check(sidr_vocab_load(path.c_str(), &v), "load vocab " + path);
    return Vocab(v);
}

CorpusH
open_corpus(const std::string& path) {
    sidr_corpus* c = nullptr;
    check(sidr_corpus_load(path.c_str(), &c), "load corpus " + path);
    return CorpusH(c);
}

Queries
open_queries(const std::string& path) {
    sidr_queries* q = nullptr;
    check(sidr_queries_load(path.c_str(), &q), "load queries " + path);
    return Queries(q);
}

BotIx
open_bot(const std::string& path) {
    sidr_bot_index* ix = nullptr;
    check(sidr_bot_index_open(path.c_str(), &ix), "open index " + path);
    return BotIx(ix);
}

ParamIx
open_param(const std::string& path) {
    sidr_param_index* ix = nullptr;
    check(sidr_param_index_open(path.c_str(), &ix), "open index " + path);
    return ParamIx(ix);
}

void
emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Failure{3, "cannot write " + path};
    }
}

// Encoder selection shared by every command that embeds text.
struct EncoderOpts {
    std::string encoder;
    std::string embeddings;
    std::string query_embeddings;
    size_t k_query = 768;
    size_t k_doc = 768;

    void
    add(CLI::App* app) {
        app->add_option("--encoder", encoder, "Toy encoder parameter file (SIDRTOY1)");
        app->add_option("--embeddings", embeddings, "Pre-computed passage embeddings (SIDREMB1)");
        app->add_option("--query-embeddings", query_embeddings,
                        "Pre-computed query embeddings (SIDREMB1)");
        app->add_option("--k-query", k_query, "Query activation count")->capture_default_str();
        app->add_option("--k-doc", k_doc, "Passage activation count")->capture_default_str();
    }

    bool
    given() const {
        return !encoder.empty() || !embeddings.empty();
    }

    Provider
    open(const Paths& at, const sidr_vocab* vocab, std::optional<size_t> k_doc_override = {}) const {
        sidr_provider* p = nullptr;
        if (!encoder.empty()) {
            if (vocab == nullptr) {
                usage("--encoder needs --vocab");
            }
            check(sidr_provider_toy(vocab, at(encoder).c_str(), k_query,
                                    k_doc_override.value_or(k_doc), &p),
                  "open encoder");
        } else if (!embeddings.empty()) {
            const std::string q = at(query_embeddings);
            check(sidr_provider_files(at(embeddings).c_str(), q.empty() ? nullptr : q.c_str(), &p),
                  "open embeddings");
        } else {
            usage("an encoder is required: pass --encoder or --embeddings");
        }
        return Provider(p);
    }
};

std::vector<size_t>
parse_list(const std::string& text, const char* what) {
    std::vector<size_t> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        try {
            size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<size_t>(v));
        } catch (const std::exception&) {
            usage(std::string("bad ") + what + " list: " + text);
        }
    }
    if (out.empty()) {
        usage(std::string("empty ") + what + " list");
    }
    return out;
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"sidr: semi-parametric sparse retrieval"};
    app.set_config("--config", "", "Key=value config file; flags override it");
    app.require_subcommand(1);
    Paths at;
    app.add_option("--workdir", at.workdir, "Base directory for relative paths")
        ->envname("SIDR_WORKDIR");

    // generate
    auto* gen = app.add_subcommand("generate", "Write synthetic data or random encoder parameters");
    std::string gen_kind = "separable";
    std::string gen_out = ".";
    uint64_t gen_seed = 0;
    size_t gen_passages = 1000;
    size_t gen_words = 256;
    size_t gen_queries = 100;
    size_t gen_dims = 16;
    std::string gen_vocab;
    gen->add_option("--kind", gen_kind, "separable, random or encoder")
        ->check(CLI::IsMember({"separable", "random", "encoder"}))
        ->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory (encoder: output file)")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--passages", gen_passages)->capture_default_str();
    gen->add_option("--words", gen_words)->capture_default_str();
    gen->add_option("--queries", gen_queries)->capture_default_str();
    gen->add_option("--dims", gen_dims, "Encoder hidden size")->capture_default_str();
    gen->add_option("--vocab", gen_vocab, "Vocabulary the encoder is sized for");

    // build-index
    auto* build = app.add_subcommand("build-index", "Build a bot, param or bm25 index");
    std::string b_type;
    std::string b_corpus;
    std::string b_vocab;
    std::string b_out;
    double b_k1 = 0.9;
    double b_b = 0.4;
    EncoderOpts b_enc;
    build->add_option("--type", b_type)
        ->required()
        ->check(CLI::IsMember({"bot", "param", "bm25"}));
    build->add_option("--corpus", b_corpus)->required();
    build->add_option("--vocab", b_vocab);
    build->add_option("--out", b_out)->required();
    build->add_option("--k1", b_k1)->capture_default_str();
    build->add_option("--b", b_b)->capture_default_str();
    b_enc.add(build);

    // search
    auto* search = app.add_subcommand("search", "Run full, beta, late or bm25 retrieval");
    std::string s_pipeline = "beta";
    std::string s_index;
    std::string s_queries;
    std::string s_corpus;
    std::string s_vocab;
    std::string s_out = "-";
    std::string s_ledger;
    std::string s_cache_file;
    size_t s_m = 100;
    size_t s_topk = 10;
    size_t s_workers = 1;
    size_t s_batch = 32;
    bool s_zeros = false;
    bool s_cache = false;
    bool s_query_tf = false;
    EncoderOpts s_enc;
    search->add_option("--pipeline", s_pipeline)
        ->check(CLI::IsMember({"full", "beta", "late", "bm25"}))
        ->capture_default_str();
    search->add_option("--index", s_index)->required();
    search->add_option("--queries", s_queries, "Queries JSONL, '-' for stdin")->required();
    search->add_option("--corpus", s_corpus, "Passage text, needed by late");
    search->add_option("--vocab", s_vocab);
    search->add_option("--out", s_out, "Results JSONL, '-' for stdout")->capture_default_str();
    search->add_option("--ledger", s_ledger, "Write the cost ledger JSON here");
    search->add_option("--m", s_m, "Candidates re-ranked by late")->capture_default_str();
    search->add_option("--topk", s_topk)->capture_default_str();
    search->add_option("--workers", s_workers)->capture_default_str();
    search->add_option("--batch-size", s_batch)->capture_default_str();
    search->add_flag("--include-zeros", s_zeros, "Keep zero-score passages");
    search->add_flag("--cache", s_cache, "Embed each late candidate once per run");
    search->add_option("--cache-file", s_cache_file, "Persistent late embedding cache");
    search->add_flag("--query-tf", s_query_tf, "bm25: count repeated query terms");
    s_enc.add(search);

    // eval
    auto* eval = app.add_subcommand("eval", "Score results or an ablation variant");
    std::string e_metric = "top-k";
    std::string e_k = "1,5,20";
    std::string e_results;
    std::string e_ablation;
    std::string e_queries;
    std::string e_corpus;
    std::string e_vocab;
    std::string e_qrels;
    std::string e_gain = "exp";
    std::string e_bot;
    std::string e_param;
    size_t e_topk = 100;
    size_t e_workers = 1;
    EncoderOpts e_enc;
    eval->add_option("--metric", e_metric)
        ->check(CLI::IsMember({"top-k", "mrr", "ndcg"}))
        ->capture_default_str();
    eval->add_option("--k", e_k, "Cut-offs for top-k accuracy")->capture_default_str();
    eval->add_option("--results", e_results, "Results JSONL to score");
    eval->add_option("--ablation", e_ablation,
                     "full, beta, lex_doc, bin_doc, lex_query, bin_query, bot_overlap");
    eval->add_option("--queries", e_queries);
    eval->add_option("--corpus", e_corpus);
    eval->add_option("--vocab", e_vocab);
    eval->add_option("--qrels", e_qrels);
    eval->add_option("--gain", e_gain)->check(CLI::IsMember({"exp", "linear"}))->capture_default_str();
    eval->add_option("--bot-index", e_bot);
    eval->add_option("--param-index", e_param);
    eval->add_option("--topk", e_topk, "Depth of ablation rankings")->capture_default_str();
    eval->add_option("--workers", e_workers)->capture_default_str();
    e_enc.add(eval);

    // train-toy
    auto* train = app.add_subcommand("train-toy", "Train the toy encoder");
    sidr_train_config tc;
    sidr_train_config_default(&tc);
    std::string t_negatives = tc.negatives;
    std::string t_corpus;
    std::string t_vocab;
    std::string t_train;
    std::string t_heldout;
    std::string t_init;
    std::string t_index;
    std::string t_out;
    std::string t_metrics;
    train->add_option("--corpus", t_corpus)->required();
    train->add_option("--vocab", t_vocab)->required();
    train->add_option("--train", t_train)->required();
    train->add_option("--heldout", t_heldout);
    train->add_option("--init", t_init, "Start from these parameters");
    train->add_option("--index", t_index, "Fixed bot index for mining and held-out search");
    train->add_option("--out", t_out, "Trained parameters")->required();
    train->add_option("--metrics", t_metrics, "Per-epoch CSV log");
    train->add_option("--epochs", tc.epochs)->capture_default_str();
    train->add_option("--lr", tc.lr)->capture_default_str();
    train->add_option("--seed", tc.seed)->capture_default_str();
    train->add_option("--batch-size", tc.batch_size)->capture_default_str();
    train->add_option("--dims", tc.dims)->capture_default_str();
    train->add_option("--k-query", tc.k_query)->capture_default_str();
    train->add_option("--k-doc", tc.k_doc)->capture_default_str();
    train->add_option("--negatives", t_negatives)
        ->check(CLI::IsMember({"none", "random", "bm25", "retrieved"}))
        ->capture_default_str();
    train->add_option("--mine-m", tc.mine_m)->capture_default_str();

    // mine-negatives
    auto* mine = app.add_subcommand("mine-negatives", "Mine one hard negative per query");
    std::string n_index;
    std::string n_corpus;
    std::string n_vocab;
    std::string n_queries;
    std::string n_out = "-";
    size_t n_m = 20;
    uint64_t n_seed = 0;
    EncoderOpts n_enc;
    mine->add_option("--index", n_index)->required();
    mine->add_option("--corpus", n_corpus)->required();
    mine->add_option("--vocab", n_vocab);
    mine->add_option("--queries", n_queries)->required();
    mine->add_option("--out", n_out)->capture_default_str();
    mine->add_option("--m", n_m)->capture_default_str();
    mine->add_option("--seed", n_seed)->capture_default_str();
    n_enc.add(mine);

    // bench
    auto* bench = app.add_subcommand("bench", "Time pipeline stages");
    std::vector<std::string> x_stages;
    std::string x_corpus;
    std::string x_vocab;
    std::string x_queries;
    std::string x_density;
    std::string x_out = "-";
    std::string x_csv;
    std::string x_score_index = "bot";
    sidr_bench_config bc;
    sidr_bench_config_default(&bc);
    EncoderOpts x_enc;
    bench->add_option("--stage", x_stages, "tokenize_corpus, embed_corpus, embed_queries, score, rerank_embed")
        ->required();
    bench->add_option("--corpus", x_corpus)->required();
    bench->add_option("--vocab", x_vocab)->required();
    bench->add_option("--queries", x_queries);
    bench->add_option("--density", x_density, "Comma-separated k_doc sweep");
    bench->add_option("--out", x_out, "Reports as JSON lines")->capture_default_str();
    bench->add_option("--csv", x_csv, "Stage table CSV");
    bench->add_option("--workers", bc.workers)->capture_default_str();
    bench->add_option("--topk", bc.topk)->capture_default_str();
    bench->add_option("--m", bc.m)->capture_default_str();
    bench->add_option("--score-index", x_score_index)
        ->check(CLI::IsMember({"bot", "param"}))
        ->capture_default_str();
    x_enc.add(bench);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Print index statistics as JSON");
    std::string i_index;
    inspect->add_option("index", i_index)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (gen_kind == "separable") {
                check(sidr_generate_separable(at(gen_out).c_str(), gen_seed), "generate");
            } else if (gen_kind == "random") {
                check(sidr_generate_random(at(gen_out).c_str(), gen_passages, gen_words,
                                           gen_queries, gen_seed),
                      "generate");
            } else {
                if (gen_vocab.empty()) {
                    usage("generate --kind encoder needs --vocab");
                }
                auto vocab = open_vocab(at(gen_vocab));
                check(sidr_toy_params_random(sidr_vocab_size(vocab.get()), gen_dims, gen_seed,
                                             at(gen_out).c_str()),
                      "generate");
            }
            return 0;
        }

        if (build->parsed()) {
            auto corpus = open_corpus(at(b_corpus));
            Vocab vocab;
            if (!b_vocab.empty()) {
                vocab = open_vocab(at(b_vocab));
            }
            if (b_type == "bot") {
                if (!vocab) {
                    usage("build-index --type bot needs --vocab");
                }
                sidr_bot_index* ix = nullptr;
                check(sidr_bot_index_build(corpus.get(), vocab.get(), &ix), "build");
                BotIx hold(ix);
                check(sidr_bot_index_save(ix, at(b_out).c_str()), "save");
            } else if (b_type == "param") {
                auto provider = b_enc.open(at, vocab.get());
                sidr_param_index* ix = nullptr;
                check(sidr_param_index_build(corpus.get(), provider.get(), b_enc.k_doc, &ix),
                      "build");
                ParamIx hold(ix);
                check(sidr_param_index_save(ix, at(b_out).c_str()), "save");
            } else {
                if (!vocab) {
                    // Word vocabulary over the corpus, saved next to the index.
                    sidr_vocab* v = nullptr;
                    check(sidr_vocab_from_corpus(corpus.get(), &v), "vocab");
                    vocab.reset(v);
                    check(sidr_vocab_save(v, (at(b_out) + ".vocab").c_str()), "save vocab");
                }
                sidr_bm25_index* ix = nullptr;
                check(sidr_bm25_index_build(corpus.get(), vocab.get(), b_k1, b_b, &ix), "build");
                Bm25Ix hold(ix);
                check(sidr_bm25_index_save(ix, at(b_out).c_str()), "save");
            }
            return 0;
        }

        if (search->parsed()) {
            sidr_search_options opts;
            sidr_search_options_default(&opts);
            opts.include_zeros = s_zeros ? 1 : 0;
            opts.workers = s_workers;
            opts.batch_size = s_batch;
            auto queries = open_queries(at(s_queries));
            Vocab vocab;
            if (!s_vocab.empty()) {
                vocab = open_vocab(at(s_vocab));
            }
            sidr_results* r = nullptr;
            size_t corpus_size = 0;
            if (s_pipeline == "bm25") {
                sidr_bm25_index* ix = nullptr;
                check(sidr_bm25_index_open(at(s_index).c_str(), &ix), "open index");
                Bm25Ix hold(ix);
                corpus_size = sidr_bm25_index_size(ix);
                if (!vocab) {
                    vocab = open_vocab(at(s_index) + ".vocab");
                }
                check(sidr_run_bm25(queries.get(), ix, vocab.get(), s_topk, s_query_tf ? 1 : 0,
                                    opts.include_zeros, &r),
                      "search");
            } else if (s_pipeline == "full") {
                auto ix = open_param(at(s_index));
                corpus_size = sidr_param_index_size(ix.get());
                auto provider = s_enc.open(at, vocab.get());
                check(sidr_run_full(queries.get(), ix.get(), provider.get(), s_topk, &opts, &r),
                      "search");
            } else if (s_pipeline == "beta") {
                auto ix = open_bot(at(s_index));
                corpus_size = sidr_bot_index_size(ix.get());
                auto provider = s_enc.open(at, vocab.get());
                check(sidr_run_beta(queries.get(), ix.get(), provider.get(), s_topk, &opts, &r),
                      "search");
            } else {
                if (s_corpus.empty()) {
                    usage("search --pipeline late needs --corpus");
                }
                auto ix = open_bot(at(s_index));
                corpus_size = sidr_bot_index_size(ix.get());
                auto corpus = open_corpus(at(s_corpus));
                auto provider = s_enc.open(at, vocab.get());
                const std::string cache = at(s_cache_file);
                check(sidr_run_late(queries.get(), ix.get(), corpus.get(), provider.get(), s_m,
                                    s_cache ? 1 : 0, cache.empty() ? nullptr : cache.c_str(),
                                    s_topk, &opts, &r),
                      "search");
            }
            Results results(r);
            char* text = nullptr;
            check(sidr_results_jsonl(r, &text), "write results");
            emit(at(s_out), take(text));
            check(sidr_results_ledger_json(r, corpus_size, &text), "ledger");
            const std::string ledger = take(text) + "\n";
            if (!s_ledger.empty()) {
                emit(at(s_ledger), ledger);
            } else {
                std::cerr << ledger;
            }
            return 0;
        }

        if (eval->parsed()) {
            Results results;
            json out;
            out["metric"] = e_metric;
            Queries queries;
            if (!e_queries.empty()) {
                queries = open_queries(at(e_queries));
            }
            CorpusH corpus;
            if (!e_corpus.empty()) {
                corpus = open_corpus(at(e_corpus));
            }
            if (!e_results.empty() == !e_ablation.empty()) {
                usage("eval needs exactly one of --results or --ablation");
            }
            if (!e_results.empty()) {
                sidr_results* r = nullptr;
                check(sidr_results_load(at(e_results).c_str(), &r), "load results");
                results.reset(r);
            } else {
                if (!queries || !corpus || e_vocab.empty()) {
                    usage("eval --ablation needs --queries, --corpus and --vocab");
                }
                auto vocab = open_vocab(at(e_vocab));
                Provider provider;
                if (e_enc.given()) {
                    provider = e_enc.open(at, vocab.get());
                }
                BotIx bot;
                ParamIx param;
                if (!e_bot.empty()) {
                    bot = open_bot(at(e_bot));
                }
                if (!e_param.empty()) {
                    param = open_param(at(e_param));
                }
                sidr_search_options opts;
                sidr_search_options_default(&opts);
                opts.workers = e_workers;
                sidr_results* r = nullptr;
                check(sidr_run_ablation(e_ablation.c_str(), queries.get(), vocab.get(),
                                        corpus.get(), provider.get(), bot.get(), param.get(),
                                        e_enc.k_doc, e_topk, &opts, &r),
                      "ablation");
                results.reset(r);
                out["ablation"] = e_ablation;
                char* ledger = nullptr;
                check(sidr_results_ledger_json(r, sidr_corpus_size(corpus.get()), &ledger),
                      "ledger");
                out["ledger"] = json::parse(take(ledger));
            }
            if (e_metric == "top-k") {
                if (!queries || !corpus) {
                    usage("eval --metric top-k needs --queries and --corpus");
                }
                for (size_t k : parse_list(e_k, "--k")) {
                    double acc = 0.0;
                    check(sidr_eval_topk(results.get(), queries.get(), corpus.get(), k, &acc),
                          "eval");
                    out["top" + std::to_string(k)] = acc;
                }
            } else {
                if (e_qrels.empty()) {
                    usage("eval --metric " + e_metric + " needs --qrels");
                }
                double value = 0.0;
                size_t evaluated = 0;
                size_t skipped = 0;
                if (e_metric == "mrr") {
                    check(sidr_eval_mrr10(results.get(), at(e_qrels).c_str(), &value, &evaluated,
                                          &skipped),
                          "eval");
                    out["mrr@10"] = value;
                } else {
                    check(sidr_eval_ndcg10(results.get(), at(e_qrels).c_str(),
                                           e_gain == "linear" ? 1 : 0, &value, &evaluated,
                                           &skipped),
                          "eval");
                    out["ndcg@10"] = value;
                    out["gain"] = e_gain;
                }
                out["evaluated"] = evaluated;
                out["skipped"] = skipped;
            }
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (train->parsed()) {
            auto vocab = open_vocab(at(t_vocab));
            auto corpus = open_corpus(at(t_corpus));
            BotIx ix;
            if (!t_index.empty()) {
                ix = open_bot(at(t_index));
            }
            tc.negatives = t_negatives.c_str();
            const std::string heldout = at(t_heldout);
            const std::string init = at(t_init);
            const std::string metrics = at(t_metrics);
            double top1 = 0.0;
            check(sidr_train_toy(vocab.get(), corpus.get(), at(t_train).c_str(),
                                 heldout.empty() ? nullptr : heldout.c_str(), &tc,
                                 init.empty() ? nullptr : init.c_str(), ix.get(),
                                 at(t_out).c_str(), metrics.empty() ? nullptr : metrics.c_str(),
                                 &top1),
                  "train-toy");
            json out = {{"epochs", tc.epochs}, {"heldout_beta_top1", top1}};
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (mine->parsed()) {
            auto ix = open_bot(at(n_index));
            auto corpus = open_corpus(at(n_corpus));
            auto queries = open_queries(at(n_queries));
            Vocab vocab;
            if (!n_vocab.empty()) {
                vocab = open_vocab(at(n_vocab));
            }
            auto provider = n_enc.open(at, vocab.get());
            std::string lines;
            for (size_t i = 0; i < sidr_queries_size(queries.get()); ++i) {
                uint32_t* dims = nullptr;
                double* weights = nullptr;
                size_t nnz = 0;
                check(sidr_provider_embed_query(provider.get(), sidr_queries_id(queries.get(), i),
                                                sidr_queries_text(queries.get(), i), &dims,
                                                &weights, &nnz),
                      "embed query");
                std::vector<const char*> answers;
                for (size_t j = 0; j < sidr_queries_answer_count(queries.get(), i); ++j) {
                    answers.push_back(sidr_queries_answer(queries.get(), i, j));
                }
                char* id = nullptr;
                int fallback = 0;
                const sidr_status st = sidr_mine_negative(
                    ix.get(), corpus.get(), dims, weights, nnz, answers.data(), answers.size(),
                    n_m, sidr_mix_seed(n_seed, i), &id, nullptr, &fallback);
                sidr_array_free(dims);
                sidr_array_free(weights);
                check(st, std::string("mine query ") + sidr_queries_id(queries.get(), i));
                json row = {{"query_id", sidr_queries_id(queries.get(), i)},
                            {"passage_id", take(id)},
                            {"from_fallback", fallback != 0}};
                lines += row.dump() + "\n";
            }
            emit(at(n_out), lines);
            return 0;
        }

        if (bench->parsed()) {
            auto vocab = open_vocab(at(x_vocab));
            auto corpus = open_corpus(at(x_corpus));
            Queries queries;
            if (!x_queries.empty()) {
                queries = open_queries(at(x_queries));
            }
            bc.score_param = x_score_index == "param" ? 1 : 0;
            std::vector<std::optional<size_t>> densities{std::nullopt};
            if (!x_density.empty()) {
                densities.clear();
                for (size_t k : parse_list(x_density, "--density")) {
                    densities.emplace_back(k);
                }
            }
            std::vector<Report> reports;
            std::string lines;
            for (const auto& density : densities) {
                Provider provider;
                if (x_enc.given()) {
                    provider = x_enc.open(at, vocab.get(), density);
                }
                for (const auto& stage : x_stages) {
                    sidr_bench_report* rep = nullptr;
                    check(sidr_bench_stage(stage.c_str(), vocab.get(), corpus.get(), queries.get(),
                                           provider.get(), &bc, &rep),
                          "bench " + stage);
                    reports.emplace_back(rep);
                    char* text = nullptr;
                    check(sidr_bench_report_json(rep, &text), "report");
                    lines += take(text) + "\n";
                }
            }
            emit(at(x_out), lines);
            if (!x_csv.empty()) {
                // One row per density.
                std::string table;
                const size_t per_row = x_stages.size();
                for (size_t start = 0; start < reports.size(); start += per_row) {
                    std::vector<const sidr_bench_report*> raw;
                    for (size_t i = start; i < start + per_row; ++i) {
                        raw.push_back(reports[i].get());
                    }
                    char* csv = nullptr;
                    check(sidr_bench_table_csv(raw.data(), raw.size(), &csv), "csv");
                    std::string rows = take(csv);
                    if (start > 0) {
                        rows = rows.substr(rows.find('\n') + 1);
                    }
                    table += rows;
                }
                emit(at(x_csv), table);
            }
            return 0;
        }

        if (inspect->parsed()) {
            char* text = nullptr;
            check(sidr_inspect(at(i_index).c_str(), &text), "inspect");
            std::cout << take(text) << "\n";
            return 0;
        }
    } catch (const Failure& f) {
        std::cerr << "sidr: " << f.message << "\n";
        return f.exit_code;
    }
    return 2;
}
