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

// Allocation of a fixed bank of single-mode squeezers over a passive network.
// For any passive network every diagonal entry of Gamma^{-1} is bounded by its
// largest eigenvalue 1/sigma_min^2; equality needs the measured quadrature to
// lie in the sigma_min^2 eigenspace of Gamma.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gqcr/gaussian.hpp"
#include "json.hpp"

namespace gqcr {

inline constexpr double kOptimalGap = 1e-8;
inline constexpr double kBoundSlack = 1e-10;

struct AllocationProblem {
    SqueezerBank bank;
    SymplecticTransform network;
    std::size_t detection_index = 0;
};

struct AllocationReport {
    double gamma_inv_11 = 0.0;
    double spectral_radius = 0.0;  // 1 / sigma_min^2
    double gap = 0.0;
    bool optimal = false;
    double eigenmode_alignment = 0.0;
    /// Largest diagonal entry of Gamma^{-1} over all quadratures.
    double max_inverse_diagonal = 0.0;
};

/// Throws PassiveRequired for networks that are not orthogonal.
AllocationReport evaluate_allocation(const AllocationProblem &problem);

/// Routes the most squeezed input (lowest index on ties) to detection_index.
std::pair<SymplecticTransform, AllocationReport> optimize_allocation(const SqueezerBank &bank,
                                                                     std::size_t detection_index);

struct AuditTrial {
    double eigenmode_alignment = 0.0;
    double gamma_inv_11 = 0.0;
    double max_inverse_diagonal = 0.0;
};

struct AuditReport {
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t detection_index = 0;
    double spectral_radius = 0.0;
    double optimal_gamma_inv_11 = 0.0;
    double max_gamma_inv_11 = 0.0;
    double max_inverse_diagonal = 0.0;
    std::int64_t bound_violations = 0;
    std::int64_t near_attainments = 0;
    /// Near-attaining trials whose alignment is below 1 - 1e-4.
    std::int64_t misaligned_attainments = 0;
    bool passed = false;
    std::vector<AuditTrial> per_trial;
};

/// Haar-random passive networks, one counter-based stream per trial.
AuditReport random_network_audit(const SqueezerBank &bank, std::int64_t trials, std::uint64_t seed,
                                 std::size_t detection_index = 0, unsigned threads = 1);

nlohmann::json to_json(const AllocationReport &report);
nlohmann::json to_json(const AuditReport &report);
std::string audit_csv(const AuditReport &report);

}  // namespace gqcr
