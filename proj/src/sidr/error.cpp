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

#include "sidr/error.hpp"

namespace sidr {

const char*
error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kFormat:
            return "format";
        case ErrorCode::kContract:
            return "contract";
        case ErrorCode::kLookup:
            return "lookup";
        case ErrorCode::kIo:
            return "io";
        case ErrorCode::kBuild:
            return "build";
        case ErrorCode::kInput:
            return "input";
        case ErrorCode::kConfig:
            return "config";
        case ErrorCode::kMiner:
            return "miner";
        case ErrorCode::kNumeric:
            return "numeric";
        case ErrorCode::kTraining:
            return "training";
    }
    return "unknown";
}

}  // namespace sidr
