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

#include "sidr/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sidr/error.hpp"

namespace sidr {

namespace {

using nlohmann::json;

std::string
string_field(const json& obj, const char* key, size_t line_no, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) {
            fail(ErrorCode::kFormat,
                 "line " + std::to_string(line_no) + ": missing field '" + key + "'");
        }
        return {};
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number_integer()) {
        return std::to_string(it->get<long long>());
    }
    fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": field '" + key +
                                 "' must be a string");
}

std::vector<std::string>
answers_field(const json& obj, size_t line_no) {
    std::vector<std::string> answers;
    auto it = obj.find("answers");
    if (it == obj.end() || it->is_null()) {
        return answers;
    }
    if (!it->is_array()) {
        fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": 'answers' must be a list");
    }
    for (const auto& a : *it) {
        if (!a.is_string()) {
            fail(ErrorCode::kFormat,
                 "line " + std::to_string(line_no) + ": answers must be strings");
        }
        answers.push_back(a.get<std::string>());
    }
    return answers;
}

template <typename Fn>
void
for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) {
            fail(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": expected an object");
        }
        fn(obj, line_no);
    }
}

std::ifstream
open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::kIo, "cannot open " + path);
    }
    return in;
}

}  // namespace

std::string
document_text(const Passage& p) {
    return p.title + " " + p.text;
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
    by_id_.reserve(passages_.size());
    for (size_t i = 0; i < passages_.size(); ++i) {
        if (!by_id_.emplace(passages_[i].id, i).second) {
            fail(ErrorCode::kBuild, "duplicate passage id '" + passages_[i].id + "'");
        }
    }
}

size_t
Corpus::ordinal_of(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? passages_.size() : it->second;
}

std::string
Corpus::fingerprint() const {
    uint64_t h = fnv1a64({});
    for (const auto& p : passages_) {
        h = fnv1a64(p.id, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
        h = fnv1a64(p.title, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
        h = fnv1a64(p.text, h);
        h = fnv1a64(std::string_view("\x1e", 1), h);
    }
    return hex64(h);
}

Corpus
read_corpus(std::istream& in) {
    std::vector<Passage> passages;
    for_each_json_line(in, [&](const json& obj, size_t line_no) {
        passages.push_back({string_field(obj, "id", line_no, true),
                            string_field(obj, "title", line_no, false),
                            string_field(obj, "text", line_no, true)});
    });
    return Corpus(std::move(passages));
}

Corpus
load_corpus(const std::string& path) {
    auto in = open_input(path);
    return read_corpus(in);
}

std::vector<Query>
read_queries(std::istream& in) {
    std::vector<Query> queries;
    for_each_json_line(in, [&](const json& obj, size_t line_no) {
        queries.push_back({string_field(obj, "id", line_no, true),
                           string_field(obj, "query", line_no, true),
                           answers_field(obj, line_no)});
    });
    return queries;
}

std::vector<Query>
load_queries(const std::string& path) {
    if (path == "-") {
        return read_queries(std::cin);
    }
    auto in = open_input(path);
    return read_queries(in);
}

std::vector<TrainExample>
load_train_examples(const std::string& path) {
    auto in = open_input(path);
    std::vector<TrainExample> examples;
    for_each_json_line(in, [&](const json& obj, size_t line_no) {
        examples.push_back({string_field(obj, "query", line_no, true),
                            string_field(obj, "positive_passage_id", line_no, true),
                            answers_field(obj, line_no)});
    });
    return examples;
}

Qrels
load_qrels(const std::string& path) {
    auto in = open_input(path);
    Qrels qrels;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) {
            cols.push_back(col);
        }
        if (cols.size() != 3) {
            fail(ErrorCode::kFormat, path + ":" + std::to_string(line_no) + ": expected 3 columns");
        }
        int grade = 0;
        try {
            size_t used = 0;
            grade = std::stoi(cols[2], &used);
            if (used != cols[2].size() || grade < 0) {
                throw std::invalid_argument("grade");
            }
        } catch (const std::exception&) {
            fail(ErrorCode::kFormat, path + ":" + std::to_string(line_no) + ": bad grade");
        }
        qrels[cols[0]][cols[1]] = grade;
    }
    return qrels;
}

void
save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path);
    }
    for (const auto& p : corpus.passages()) {
        out << json{{"id", p.id}, {"title", p.title}, {"text", p.text}}.dump() << '\n';
    }
}

void
save_queries(const std::vector<Query>& queries, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::kIo, "cannot write " + path);
    }
    for (const auto& q : queries) {
        json obj{{"id", q.id}, {"query", q.text}};
        if (!q.answers.empty()) {
            obj["answers"] = q.answers;
        }
        out << obj.dump() << '\n';
    }
}

uint64_t
fnv1a64(std::string_view bytes, uint64_t seed) {
    uint64_t h = seed;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string
hex64(uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace sidr
