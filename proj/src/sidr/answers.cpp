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

#include "sidr/answers.hpp"

namespace sidr {

std::string
normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    }
    return out;
}

AnswerMatcher::AnswerMatcher(std::span<const std::string> answers) {
    for (const auto& a : answers) {
        auto n = normalize_text(a);
        if (!n.empty()) {
            answers_.push_back(std::move(n));
        }
    }
}

bool
AnswerMatcher::matches(std::string_view text) const {
    if (answers_.empty()) {
        return false;
    }
    auto norm = normalize_text(text);
    for (const auto& a : answers_) {
        if (norm.find(a) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool
contains_answer(std::string_view text, std::span<const std::string> answers) {
    return AnswerMatcher(answers).matches(text);
}

}  // namespace sidr
