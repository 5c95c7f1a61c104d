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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sidr {

/// ASCII-lowercases, collapses whitespace runs to one space, trims.
std::string
normalize_text(std::string_view text);

/// Exact-substring answer test over normalized text. Shared by negative mining
/// and answer-based accuracy so both agree on what counts as a hit.
class AnswerMatcher {
public:
    /// Answers that normalize to the empty string are dropped.
    explicit AnswerMatcher(std::span<const std::string> answers);

    bool
    empty() const {
        return answers_.empty();
    }

    bool
    matches(std::string_view text) const;

private:
    std::vector<std::string> answers_;
};

bool
contains_answer(std::string_view text, std::span<const std::string> answers);

}  // namespace sidr
