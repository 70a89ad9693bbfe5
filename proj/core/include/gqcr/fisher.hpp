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

// Quantum Fisher information and Cramer-Rao bounds for pure Gaussian states.

#include <cstdint>
#include <optional>
#include <string>

#include "gqcr/gaussian.hpp"
#include "gqcr/models.hpp"
#include "json.hpp"

namespace gqcr {

struct QfiTerms {
    double mean_term = 0.0;  // X'^T Gamma^{-1} X'
    double cov_term = 0.0;   // tr((Gamma' Gamma^{-1})^2) / 4

    double total() const noexcept { return mean_term + cov_term; }
};

/// Inputs gathered before the final bound is assembled.
struct FisherInputs {
    QfiTerms terms;
    /// 4 (Gamma^{-1})_[1,1] ||a'||^2 in the detection basis; empty when the
    /// mean field does not move.
    std::optional<double> i_reduced;
    std::optional<double> gamma_inv_11;
    /// N (4 ||u'||^2 + (N'/N)^2); empty when N = 0.
    std::optional<double> i_zero;
    double n = 0.0;
    double n_prime = 0.0;
    double u_prime_norm_sq = 0.0;
    double a_prime_norm_sq = 0.0;
};

struct FisherReport {
    double i_full = 0.0;
    double i_mean_term = 0.0;
    double i_cov_term = 0.0;
    double i_reduced = 0.0;
    double i_zero = 0.0;
    double gamma_inv_11 = 0.0;
    double delta_theta_min = 0.0;
    /// Bound from the linearized (mean-field only) information; +inf when
    /// no detection mode exists.
    double delta_theta_linearized = 0.0;
    double delta_theta_min_single = 0.0;
    double delta_theta_linearized_single = 0.0;
    std::int64_t q = 1;
    double cov_term_ratio = 0.0;
    bool linearized_available = false;

    // The three factors of the linearized bound.
    double n = 0.0;
    double n_prime = 0.0;
    double u_prime_norm_sq = 0.0;
    double a_prime_norm_sq = 0.0;
    double mode_shape_term = 0.0;     // 4 ||u'||^2
    double photon_number_term = 0.0;  // (N'/N)^2
};

/// Mean and covariance terms via a Cholesky factor of Gamma; no explicit inverse.
QfiTerms qfi_full(const RealVector &mean_prime, const RealMatrix &cov, const RealMatrix &cov_prime);

/// 4 (Gamma^{-1})_[1,1] ||a'||^2 with [1,1] the x quadrature of mode 1.
double qfi_reduced(double a_bar_prime_norm_sq, const RealMatrix &cov_in_detection_basis);

/// (Gamma^{-1})_[i,i] by a Cholesky solve.
double inverse_diagonal_entry(const RealMatrix &cov, Eigen::Index index);

/// Explicit inverse; reserved for brute-force cross checks.
RealMatrix debug_explicit_inverse(const RealMatrix &cov);

/// N (4 ||u'||^2 + (N'/N)^2).
double coherent_info(double n, double u_prime_norm_sq, double n_prime);

FisherReport qcr_bound(const FisherInputs &inputs, std::int64_t q);

/// sigma_min / sqrt(Q N) (4 ||u'||^2 + (N'/N)^2)^{-1/2}.
double optimal_bound(double sigma_min, double n, double u_prime_norm_sq, double n_prime, std::int64_t q);

// ---------------------------------------------------------------------------
// End-to-end analysis of a parametric family at theta = 0.

enum class DerivativeMode { Numeric, Analytic };

struct AnalysisOptions {
    DerivativeMode derivatives = DerivativeMode::Numeric;
    DifferentiateOptions differentiate;
    std::int64_t q = 1;
};

/// Detection basis expressed through the family's own basis.
struct DetectionFrame {
    ModeBasis basis;
    ComplexMatrix unitary;  // U_ij = <detection_i, model_j>
    RealMatrix cov;         // Gamma in the detection basis
    RealVector mean_prime;  // X' in the detection basis
};

struct Analysis {
    DerivativeBundle bundle;
    FisherInputs inputs;
    FisherReport report;
    std::optional<DetectionFrame> detection;
};

/// Throws PurityError for mixed states and NoInformation when both terms vanish.
Analysis analyze(const ParametricFamily &family, const GridPtr &grid, const AnalysisOptions &options = {});

/// Rotates the bundle into the detection basis completed from the family
/// basis. Throws ZeroDetectionMode when a' = 0.
DetectionFrame detection_frame(const DerivativeBundle &bundle);

nlohmann::json to_json(const FisherReport &report);

/// Header and row of the sweep CSV format.
std::string fisher_csv_header();
std::string fisher_csv_row(const std::string &model_params, const FisherReport &report);

}  // namespace gqcr
