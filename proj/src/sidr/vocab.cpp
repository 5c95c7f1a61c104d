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

#include "sidr/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "sidr/error.hpp"

namespace sidr {

namespace {

bool
is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool
is_punct(unsigned char c) {
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::string continuation_prefix,
                       std::string unknown_token)
    : tokens_(std::move(tokens)),
      continuation_prefix_(std::move(continuation_prefix)),
      unknown_token_(std::move(unknown_token)) {
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i) {
        const auto& tok = tokens_[i];
        if (tok.empty()) {
            fail(ErrorCode::kFormat, "vocabulary: empty token at line " + std::to_string(i + 1));
        }
        auto [it, inserted] = index_.emplace(tok, static_cast<TokenId>(i));
        if (!inserted) {
            fail(ErrorCode::kFormat,
                 "vocabulary: duplicate token '" + tok + "' at line " + std::to_string(i + 1));
        }
        max_token_bytes_ = std::max(max_token_bytes_, tok.size());
    }
    auto it = index_.find(unknown_token_);
    if (it == index_.end()) {
        fail(ErrorCode::kFormat, "vocabulary: unknown token '" + unknown_token_ + "' missing");
    }
    unknown_id_ = it->second;
}

TokenId
Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? static_cast<TokenId>(tokens_.size()) : it->second;
}

Vocabulary
load_vocab(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open vocabulary file: " + path);
    }
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        tokens.push_back(std::move(line));
    }
    return Vocabulary(std::move(tokens));
}

void
save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write vocabulary file: " + path);
    }
    for (const auto& tok : vocab.tokens()) {
        out << tok << '\n';
    }
}

std::vector<std::string>
basic_split(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            words.emplace_back(1, ch);
        } else if (c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            cur.push_back(ch);
        }
    }
    flush();
    return words;
}

Vocabulary
build_word_vocab(const std::vector<std::string>& texts) {
    std::set<std::string> words;
    for (const auto& t : texts) {
        for (auto& w : basic_split(t)) {
            if (w != kUnknownToken) {
                words.insert(std::move(w));
            }
        }
    }
    std::vector<std::string> tokens(words.begin(), words.end());
    tokens.emplace_back(kUnknownToken);
    return Vocabulary(std::move(tokens));
}

size_t
utf8_length(std::string_view text) {
    size_t n = 0;
    for (char ch : text) {
        if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

void
wordpiece(const Vocabulary& vocab, std::string_view word, std::vector<TokenId>& out) {
    if (utf8_length(word) > kMaxWordChars) {
        out.push_back(vocab.unknown_id());
        return;
    }
    const auto& prefix = vocab.continuation_prefix();
    size_t mark = out.size();
    size_t start = 0;
    std::string piece;
    while (start < word.size()) {
        size_t end = std::min(word.size(), start + vocab.max_token_bytes());
        TokenId found = static_cast<TokenId>(vocab.size());
        while (end > start) {
            piece.clear();
            if (start > 0) {
                piece = prefix;
            }
            piece.append(word.substr(start, end - start));
            TokenId id = vocab.find(piece);
            if (id != vocab.size()) {
                found = id;
                break;
            }
            --end;
        }
        if (found == vocab.size()) {
            out.resize(mark);
            out.push_back(vocab.unknown_id());
            return;
        }
        out.push_back(found);
        start = end;
    }
}

TokenSeq
tokenize(const Vocabulary& vocab, std::string_view text, size_t max_tokens) {
    TokenSeq seq;
    seq.source_len = utf8_length(text);
    for (const auto& word : basic_split(text)) {
        if (seq.ids.size() >= max_tokens) {
            break;
        }
        wordpiece(vocab, word, seq.ids);
    }
    if (seq.ids.size() > max_tokens) {
        seq.ids.resize(max_tokens);
    }
    return seq;
}

}  // namespace sidr
