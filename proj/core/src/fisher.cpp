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

#include "gqcr/fisher.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gqcr/error.hpp"
#include "gqcr/json_io.hpp"

namespace gqcr {

namespace {

Eigen::LLT<RealMatrix> factor_covariance(const RealMatrix &cov) {
    if (cov.rows() == 0 || cov.rows() != cov.cols()) raise(ErrorCode::DimensionError, "covariance must be square");
    if (!cov.allFinite()) raise(ErrorCode::CovarianceError, "covariance has non-finite entries");
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
        raise(ErrorCode::CovarianceError, "covariance is not symmetric");
    }
    Eigen::LLT<RealMatrix> llt(0.5 * (cov + cov.transpose()));
    if (llt.info() != Eigen::Success) raise(ErrorCode::CovarianceError, "covariance is singular or indefinite");
    // LLT accepts matrices that are numerically semidefinite; reject a zero pivot.
    const auto diag = llt.matrixL().toDenseMatrix().diagonal();
    if (!(diag.minCoeff() > 0.0)) raise(ErrorCode::CovarianceError, "covariance is singular");
    return llt;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

QfiTerms qfi_full(const RealVector &mean_prime, const RealMatrix &cov, const RealMatrix &cov_prime) {
    if (mean_prime.size() != cov.rows() || cov_prime.rows() != cov.rows() || cov_prime.cols() != cov.cols()) {
        raise(ErrorCode::DimensionError, "mean derivative, covariance and covariance derivative disagree in size");
    }
    const auto llt = factor_covariance(cov);
    const auto lower = llt.matrixL();
    QfiTerms terms;
    const RealVector whitened = lower.solve(mean_prime);
    terms.mean_term = whitened.squaredNorm();
    // tr((G' G^{-1})^2) = ||L^{-1} G' L^{-T}||_F^2 because the whitened
    // derivative is symmetric.
    const RealMatrix half = lower.solve(cov_prime);
    const RealMatrix whitened_prime = lower.solve(half.transpose());
    terms.cov_term = 0.25 * whitened_prime.squaredNorm();
    return terms;
}

double inverse_diagonal_entry(const RealMatrix &cov, Eigen::Index index) {
    if (index < 0 || index >= cov.rows()) raise(ErrorCode::DimensionError, "index outside covariance");
    const auto llt = factor_covariance(cov);
    RealVector e = RealVector::Zero(cov.rows());
    e(index) = 1.0;
    return llt.matrixL().solve(e).squaredNorm();
}

RealMatrix debug_explicit_inverse(const RealMatrix &cov) {
    factor_covariance(cov);
    return cov.inverse();
}

double qfi_reduced(double a_bar_prime_norm_sq, const RealMatrix &cov_in_detection_basis) {
    if (!(a_bar_prime_norm_sq >= 0.0)) raise(ErrorCode::InvalidArgument, "||a'||^2 must be non-negative");
    return 4.0 * inverse_diagonal_entry(cov_in_detection_basis, 0) * a_bar_prime_norm_sq;
}

double coherent_info(double n, double u_prime_norm_sq, double n_prime) {
    if (!(n > 0.0) || !std::isfinite(n)) raise(ErrorCode::InvalidPhotonNumber, "photon number must be positive");
    const double ratio = n_prime / n;
    return n * (4.0 * u_prime_norm_sq + ratio * ratio);
}

FisherReport qcr_bound(const FisherInputs &inputs, std::int64_t q) {
    if (q < 1) raise(ErrorCode::InvalidArgument, "repetition count Q must be at least 1");
    FisherReport r;
    r.q = q;
    r.i_mean_term = inputs.terms.mean_term;
    r.i_cov_term = inputs.terms.cov_term;
    r.i_full = r.i_mean_term + r.i_cov_term;
    if (!(r.i_full > 0.0)) {
        raise(ErrorCode::NoInformation, "quantum Fisher information vanishes; theta is not identifiable at first order");
    }
    const double qd = static_cast<double>(q);
    r.delta_theta_min_single = 1.0 / std::sqrt(r.i_full);
    r.delta_theta_min = 1.0 / std::sqrt(qd * r.i_full);
    r.cov_term_ratio = r.i_cov_term / r.i_full;

    r.linearized_available = inputs.i_reduced.has_value() && *inputs.i_reduced > 0.0;
    r.i_reduced = inputs.i_reduced.value_or(0.0);
    r.gamma_inv_11 = inputs.gamma_inv_11.value_or(nan());
    if (r.linearized_available) {
        r.delta_theta_linearized_single = 1.0 / std::sqrt(r.i_reduced);
        r.delta_theta_linearized = 1.0 / std::sqrt(qd * r.i_reduced);
    } else {
        r.delta_theta_linearized_single = std::numeric_limits<double>::infinity();
        r.delta_theta_linearized = std::numeric_limits<double>::infinity();
    }
    r.i_zero = inputs.i_zero.value_or(0.0);
    r.n = inputs.n;
    r.n_prime = inputs.n_prime;
    r.u_prime_norm_sq = inputs.u_prime_norm_sq;
    r.a_prime_norm_sq = inputs.a_prime_norm_sq;
    r.mode_shape_term = 4.0 * inputs.u_prime_norm_sq;
    r.photon_number_term = inputs.n > 0.0 ? (inputs.n_prime / inputs.n) * (inputs.n_prime / inputs.n) : 0.0;
    return r;
}

double optimal_bound(double sigma_min, double n, double u_prime_norm_sq, double n_prime, std::int64_t q) {
    if (!(sigma_min > 0.0)) raise(ErrorCode::InvalidVariance, "sigma_min must be positive");
    if (q < 1) raise(ErrorCode::InvalidArgument, "repetition count Q must be at least 1");
    const double info = coherent_info(n, u_prime_norm_sq, n_prime);
    if (!(info > 0.0)) raise(ErrorCode::NoInformation, "coherent information vanishes");
    return sigma_min / std::sqrt(static_cast<double>(q) * info);
}

DetectionFrame detection_frame(const DerivativeBundle &bundle) {
    const auto &model_modes = bundle.basis.modes();
    ModeBasis detection = build_detection_basis(bundle.a_bar_prime, bundle.basis.size(),
                                                std::span<const ComplexField>(model_modes));
    ComplexMatrix u = basis_change(detection, bundle.basis);
    const SymplecticTransform o = symplectic_from_unitary(u);
    RealMatrix cov = o.matrix() * bundle.cov0 * o.matrix().transpose();
    cov = 0.5 * (cov + cov.transpose());
    RealVector mean_prime = o.matrix() * bundle.mean_prime();
    return DetectionFrame{std::move(detection), std::move(u), std::move(cov), std::move(mean_prime)};
}

Analysis analyze(const ParametricFamily &family, const GridPtr &grid, const AnalysisOptions &options) {
    DerivativeBundle bundle = options.derivatives == DerivativeMode::Analytic
                                  ? differentiate_analytic(family, grid)
                                  : differentiate(family, grid, options.differentiate);

    const GaussianState origin(bundle.mean0(), bundle.cov0);
    const PurityReport purity = check_purity(origin);
    if (!purity.pure) {
        raise(ErrorCode::PurityError, "model " + family.id() + " is not pure at theta = 0 (residual " +
                                          std::to_string(purity.residual) + ")");
    }

    FisherInputs inputs;
    inputs.terms = qfi_full(bundle.mean_prime(), bundle.cov0, bundle.cov_prime);
    inputs.n = bundle.n;
    inputs.n_prime = bundle.n_prime;
    inputs.a_prime_norm_sq = norm_sq(bundle.a_bar_prime);

    std::optional<DetectionFrame> frame;
    if (std::sqrt(inputs.a_prime_norm_sq) > kZeroFieldThreshold) {
        frame = detection_frame(bundle);
        inputs.gamma_inv_11 = inverse_diagonal_entry(frame->cov, 0);
        inputs.i_reduced = qfi_reduced(inputs.a_prime_norm_sq, frame->cov);
    }
    if (bundle.n > 0.0 && bundle.u_prime) {
        inputs.u_prime_norm_sq = norm_sq(*bundle.u_prime);
        inputs.i_zero = coherent_info(bundle.n, inputs.u_prime_norm_sq, bundle.n_prime);
    }
    FisherReport report = qcr_bound(inputs, options.q);
    return Analysis{std::move(bundle), inputs, report, std::move(frame)};
}

nlohmann::json to_json(const FisherReport &r) {
    return {{"i_full", r.i_full},
            {"i_mean_term", r.i_mean_term},
            {"i_cov_term", r.i_cov_term},
            {"i_reduced", r.i_reduced},
            {"i_zero", r.i_zero},
            {"gamma_inv_11", r.gamma_inv_11},
            {"q", r.q},
            {"delta_theta_min", r.delta_theta_min},
            {"delta_theta_linearized", r.delta_theta_linearized},
            {"delta_theta_min_single", r.delta_theta_min_single},
            {"delta_theta_linearized_single", r.delta_theta_linearized_single},
            {"cov_term_ratio", r.cov_term_ratio},
            {"linearized_available", r.linearized_available},
            {"factors",
             {{"N", r.n},
              {"N_prime", r.n_prime},
              {"QN", static_cast<double>(r.q) * r.n},
              {"u_prime_norm_sq", r.u_prime_norm_sq},
              {"a_prime_norm_sq", r.a_prime_norm_sq},
              {"mode_shape_term", r.mode_shape_term},
              {"photon_number_term", r.photon_number_term},
              {"gamma_inv_11", r.gamma_inv_11}}}};
}

std::string fisher_csv_header() {
    return "model,params,N,Q,i_mean_term,i_cov_term,i_full,gamma_inv_11,bound_full,bound_linearized";
}

std::string fisher_csv_row(const std::string &model_params, const FisherReport &r) {
    std::ostringstream out;
    out << model_params << ',' << format_double(r.n) << ',' << r.q << ',' << format_double(r.i_mean_term) << ','
        << format_double(r.i_cov_term) << ',' << format_double(r.i_full) << ',' << format_double(r.gamma_inv_11)
        << ',' << format_double(r.delta_theta_min) << ',' << format_double(r.delta_theta_linearized);
    return out.str();
}

}  // namespace gqcr
