// Copyright 2026 The gqcr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gqcr/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gqcr/error.hpp"

namespace gqcr {

namespace {

void emit(std::ostringstream &out, const nlohmann::json &value, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (value.type()) {
        case nlohmann::json::value_t::object: {
            if (value.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << nlohmann::json(it.key()).dump() << ": ";
                emit(out, it.value(), depth + 1);
            }
            out << "\n" << close_pad << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (value.empty()) {
                out << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool scalar = true;
            for (const auto &item : value) scalar = scalar && !item.is_structured();
            if (scalar) {
                out << "[";
                for (std::size_t i = 0; i < value.size(); ++i) {
                    if (i) out << ", ";
                    emit(out, value[i], depth + 1);
                }
                out << "]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) out << ",\n";
                out << pad;
                emit(out, value[i], depth + 1);
            }
            out << "\n" << close_pad << "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double d = value.get<double>();
            if (std::isfinite(d)) {
                out << format_double(d);
            } else {
                out << "null";
            }
            return;
        }
        default:
            out << value.dump();
    }
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string dump_json(const nlohmann::json &value) {
    std::ostringstream out;
    emit(out, value, 0);
    out << "\n";
    return out.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) raise(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    file << contents;
    if (!file) raise(ErrorCode::IoError, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) raise(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

}  // namespace gqcr
