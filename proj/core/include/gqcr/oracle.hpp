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

// Independent route to the Fisher information through state overlaps of
// Gaussian Wigner functions, used to cross-check the fisher module.

#include <cstdint>
#include <string>
#include <vector>

#include "gqcr/gaussian.hpp"
#include "gqcr/models.hpp"

namespace gqcr {

enum class OverlapMethod { ClosedForm, GridIntegration };

struct OverlapResult {
    double overlap_sq = 0.0;
    OverlapMethod method = OverlapMethod::ClosedForm;
    double bures_distance = 0.0;  // sqrt(2 (1 - sqrt(overlap_sq)))
    /// 1 - overlap_sq, computed without cancellation for the closed form.
    double deficit = 0.0;
};

/// |<psi1|psi2>|^2 = 2^M / sqrt(det(G1 + G2)) exp(-d^T (G1 + G2)^{-1} d / 2).
OverlapResult overlap_closed_form(const GaussianState &s1, const GaussianState &s2);

/// 4 pi sum W1 W2 dA over a square phase-space box of half-width box centered
/// between the two means; single mode only.
OverlapResult overlap_grid(const GaussianState &s1, const GaussianState &s2, double box, int points_per_axis);

/// Box half-width and point count that satisfy overlap_grid's coverage and
/// resolution requirements for this pair.
struct GridPlan {
    double box = 0.0;
    int points_per_axis = 0;
};
GridPlan plan_overlap_grid(const GaussianState &s1, const GaussianState &s2);

/// I = 4 (1 - |<psi_0|psi_h>|^2) / h^2, Richardson-extrapolated over h, h/2.
/// Throws StepTooLarge when 1 - overlap_sq >= 0.01 at step h.
double qfi_from_overlap(const ParametricFamily &family, const GridPtr &grid, double h);

/// Chooses a step whose overlap deficit is about 1e-4 and calls
/// qfi_from_overlap. Throws NoInformation when the state does not move.
double qfi_from_overlap_auto(const ParametricFamily &family, const GridPtr &grid);

/// (2 sqrt(Q) s / h)^{-1} with s the Bures distance between theta = 0 and h.
double bures_bound(const ParametricFamily &family, const GridPtr &grid, double h, std::int64_t q);

struct OracleCase {
    std::string case_id;
    double i_fisher_direct = 0.0;
    double i_fisher_overlap = 0.0;
    double rel_err = 0.0;
    bool skipped = false;
    std::string note;
};

/// Direct (numeric derivatives) vs overlap route for one family.
OracleCase compare_routes(const std::string &case_id, const ParametricFamily &family, const GridPtr &grid);

std::string oracle_csv_header();
std::string oracle_csv_row(const OracleCase &c);

}  // namespace gqcr
