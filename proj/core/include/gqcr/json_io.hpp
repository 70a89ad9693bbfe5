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

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace gqcr {

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double value);

/// Pretty-printed JSON with every floating-point number written at 17
/// significant digits and non-finite numbers written as null.
std::string dump_json(const nlohmann::json &value);

void write_text_file(const std::filesystem::path &path, const std::string &contents);
std::string read_text_file(const std::filesystem::path &path);

}  // namespace gqcr
