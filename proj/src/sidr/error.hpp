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

#include <stdexcept>
#include <string>

namespace sidr {

enum class ErrorCode {
    kFormat,    // malformed file or record
    kContract,  // precondition violated by the caller
    kLookup,    // id not present
    kIo,        // open/read/write failure
    kBuild,     // index build failure
    kInput,     // semantically invalid input data (missing answers, unknown query)
    kConfig,    // missing prerequisite or invalid option
    kMiner,     // no negative could be found
    kNumeric,   // non-finite values
    kTraining,  // divergence during training
};

const char*
error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {
    }

    ErrorCode
    code() const noexcept {
        return code_;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void
fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void
require(bool condition, const std::string& message) {
    if (!condition) {
        throw Error(ErrorCode::kContract, message);
    }
}

}  // namespace sidr
