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

#include "gqcr/error.hpp"

namespace gqcr {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidVariance: return "InvalidVariance";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::GridError: return "GridError";
        case ErrorCode::ResolutionError: return "ResolutionError";
        case ErrorCode::ZeroMeanField: return "ZeroMeanField";
        case ErrorCode::ZeroDetectionMode: return "ZeroDetectionMode";
        case ErrorCode::BasisDeficient: return "BasisDeficient";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::CovarianceError: return "CovarianceError";
        case ErrorCode::InvalidPhotonNumber: return "InvalidPhotonNumber";
        case ErrorCode::NoInformation: return "NoInformation";
        case ErrorCode::PurityError: return "PurityError";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::CoverageError: return "CoverageError";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
        case ErrorCode::PassiveRequired: return "PassiveRequired";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string &message) { throw Error(code, message); }

}  // namespace gqcr
