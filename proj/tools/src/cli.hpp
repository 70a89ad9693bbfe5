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

// Command-line front end:
//   gqcr <command> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
// with GQCR_THREADS as the fallback for --threads.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gqcr/error.hpp"
#include "json.hpp"

namespace gqcr::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitVerification = 4;

inline constexpr int kConfigVersion = 1;

struct Invocation {
    std::string command;
    std::filesystem::path config;
    std::filesystem::path out = "gqcr-out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

/// Parses argv and runs the command. Never throws.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Runs an already parsed invocation. Never throws.
int execute(const Invocation &inv, std::ostream &out, std::ostream &err);

/// Same, with the configuration given directly.
int execute(const Invocation &inv, const nlohmann::json &config, std::ostream &out, std::ostream &err);

int exit_code_for(ErrorCode code);

/// --threads, else GQCR_THREADS, else the hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> requested);

}  // namespace gqcr::cli
