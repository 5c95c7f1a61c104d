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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "sidr/error.hpp"

namespace sidr::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; add byte swapping for this host");

/// Append-only little-endian byte buffer.
class ByteWriter {
public:
    template <typename T>
    void
    put(T value) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* p = reinterpret_cast<const char*>(&value);
        bytes_.append(p, sizeof(T));
    }

    void
    put_bytes(std::string_view bytes) {
        bytes_.append(bytes);
    }

    /// u16 length prefix + bytes.
    void
    put_short_string(std::string_view s) {
        if (s.size() > UINT16_MAX) {
            fail(ErrorCode::kContract, "id longer than 65535 bytes");
        }
        put<uint16_t>(static_cast<uint16_t>(s.size()));
        put_bytes(s);
    }

    const std::string&
    bytes() const {
        return bytes_;
    }

private:
    std::string bytes_;
};

class ByteReader {
public:
    ByteReader(std::string_view bytes, std::string what)
        : bytes_(bytes), what_(std::move(what)) {
    }

    template <typename T>
    T
    get() {
        static_assert(std::is_trivially_copyable_v<T>);
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string_view
    get_bytes(size_t n) {
        need(n);
        auto view = bytes_.substr(pos_, n);
        pos_ += n;
        return view;
    }

    std::string
    get_short_string() {
        auto n = get<uint16_t>();
        return std::string(get_bytes(n));
    }

    void
    expect_magic(std::string_view magic) {
        if (bytes_.size() < magic.size() || bytes_.substr(0, magic.size()) != magic) {
            fail(ErrorCode::kFormat, what_ + ": bad magic (expected " + std::string(magic) + ")");
        }
        pos_ = magic.size();
    }

    bool
    at_end() const {
        return pos_ == bytes_.size();
    }

    void
    expect_end() const {
        if (!at_end()) {
            fail(ErrorCode::kFormat, what_ + ": trailing bytes");
        }
    }

    [[noreturn]] void
    corrupt(const std::string& why) const {
        fail(ErrorCode::kFormat, what_ + ": " + why);
    }

private:
    void
    need(size_t n) const {
        if (bytes_.size() - pos_ < n) {
            fail(ErrorCode::kFormat, what_ + ": truncated");
        }
    }

    std::string_view bytes_;
    std::string what_;
    size_t pos_ = 0;
};

std::string
read_file(const std::string& path);

void
write_file(const std::string& path, std::string_view bytes);

}  // namespace sidr::io
