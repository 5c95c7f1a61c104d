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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sidr {

using TokenId = uint32_t;

inline constexpr std::string_view kUnknownToken = "[UNK]";
inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr size_t kMaxWordChars = 100;
inline constexpr size_t kMaxSequenceTokens = 256;

struct TokenSeq {
    std::vector<TokenId> ids;
    size_t source_len = 0;  // in UTF-8 code points
};

/// Token string <-> dense id mapping. Immutable once constructed.
class Vocabulary {
public:
    /// Throws Error(kFormat) on duplicate or empty tokens, or when
    /// `unknown_token` is absent.
    explicit Vocabulary(std::vector<std::string> tokens,
                        std::string continuation_prefix = std::string(kContinuationPrefix),
                        std::string unknown_token = std::string(kUnknownToken));

    size_t
    size() const {
        return tokens_.size();
    }

    const std::string&
    token(TokenId id) const {
        return tokens_.at(id);
    }

    const std::vector<std::string>&
    tokens() const {
        return tokens_;
    }

    /// Returns size() when absent.
    TokenId
    find(std::string_view token) const;

    bool
    contains(std::string_view token) const {
        return find(token) != size();
    }

    TokenId
    unknown_id() const {
        return unknown_id_;
    }

    const std::string&
    continuation_prefix() const {
        return continuation_prefix_;
    }

    const std::string&
    unknown_token() const {
        return unknown_token_;
    }

    /// Longest stored token length in bytes; bounds the greedy matcher.
    size_t
    max_token_bytes() const {
        return max_token_bytes_;
    }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
    std::string continuation_prefix_;
    std::string unknown_token_;
    TokenId unknown_id_ = 0;
    size_t max_token_bytes_ = 0;
};

/// One token per line, line number = id. LF endings; a trailing CR is stripped.
Vocabulary
load_vocab(const std::string& path);

void
save_vocab(const Vocabulary& vocab, const std::string& path);

/// Lowercases ASCII, splits on whitespace and ASCII punctuation. Bytes >= 0x80
/// are kept inside words untouched.
std::vector<std::string>
basic_split(std::string_view text);

/// Word-level vocabulary: every distinct basic_split word of `texts`, sorted,
/// followed by [UNK].
Vocabulary
build_word_vocab(const std::vector<std::string>& texts);

/// Greedy longest-match sub-word segmentation of one word. A word that cannot
/// be fully segmented, or is longer than kMaxWordChars, becomes a single [UNK].
void
wordpiece(const Vocabulary& vocab, std::string_view word, std::vector<TokenId>& out);

/// basic_split + wordpiece, truncated to `max_tokens`.
TokenSeq
tokenize(const Vocabulary& vocab, std::string_view text, size_t max_tokens = kMaxSequenceTokens);

size_t
utf8_length(std::string_view text);

}  // namespace sidr
