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

#include "gqcr/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gqcr/error.hpp"

namespace gqcr {

RealMatrix symplectic_form(std::size_t mode_count) {
    const auto m = static_cast<Eigen::Index>(mode_count);
    RealMatrix omega = RealMatrix::Zero(2 * m, 2 * m);
    omega.topRightCorner(m, m) = RealMatrix::Identity(m, m);
    omega.bottomLeftCorner(m, m) = -RealMatrix::Identity(m, m);
    return omega;
}

double db_to_variance(double db) { return std::pow(10.0, -db / 10.0); }

GaussianState::GaussianState(RealVector mean, RealMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() == 0 || cov_.rows() != cov_.cols() || cov_.rows() % 2 != 0) {
        raise(ErrorCode::DimensionError, "covariance must be a non-empty 2M x 2M matrix");
    }
    if (mean_.size() != cov_.rows()) {
        raise(ErrorCode::DimensionError, "mean length " + std::to_string(mean_.size()) +
                                             " does not match covariance size " + std::to_string(cov_.rows()));
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        raise(ErrorCode::CovarianceError, "state contains non-finite entries");
    }
    const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
        raise(ErrorCode::CovarianceError, "covariance is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    }
    cov_ = 0.5 * (cov_ + cov_.transpose());
    Eigen::LLT<RealMatrix> llt(cov_);
    if (llt.info() != Eigen::Success) {
        raise(ErrorCode::CovarianceError, "covariance is not positive definite");
    }
    mode_count_ = static_cast<std::size_t>(cov_.rows() / 2);
}

GaussianState GaussianState::vacuum(std::size_t mode_count) {
    const auto n = static_cast<Eigen::Index>(2 * mode_count);
    return GaussianState(RealVector::Zero(n), RealMatrix::Identity(n, n));
}

SymplecticTransform::SymplecticTransform(RealMatrix matrix, std::optional<ComplexMatrix> origin)
    : matrix_(std::move(matrix)), origin_(std::move(origin)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0) {
        raise(ErrorCode::DimensionError, "symplectic matrix must be 2M x 2M");
    }
    const RealMatrix omega = symplectic_form(mode_count());
    const double residual = (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, matrix_.squaredNorm() / static_cast<double>(matrix_.rows()));
    if (residual > kUnitaryTolerance * scale) {
        raise(ErrorCode::InvalidArgument, "matrix is not symplectic (residual " + std::to_string(residual) + ")");
    }
}

bool SymplecticTransform::is_passive(double tolerance) const {
    const auto n = matrix_.rows();
    return (matrix_ * matrix_.transpose() - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tolerance;
}

SymplecticTransform SymplecticTransform::inverse() const {
    // O^{-1} = -Omega O^T Omega for symplectic O.
    const RealMatrix omega = symplectic_form(mode_count());
    std::optional<ComplexMatrix> inv_origin;
    if (origin_) inv_origin = origin_->adjoint();
    return SymplecticTransform(-omega * matrix_.transpose() * omega, std::move(inv_origin));
}

SqueezerBank SqueezerBank::from_db(const std::vector<double> &db_levels) {
    SqueezerBank bank;
    bank.variances.reserve(db_levels.size());
    for (double db : db_levels) bank.variances.push_back(db_to_variance(db));
    return bank;
}

double SqueezerBank::min_variance() const {
    if (variances.empty()) raise(ErrorCode::InvalidArgument, "empty squeezer bank");
    return *std::min_element(variances.begin(), variances.end());
}

GaussianState make_squeezed_bank(const SqueezerBank &bank) {
    if (bank.variances.empty()) raise(ErrorCode::InvalidVariance, "squeezer bank is empty");
    const auto m = static_cast<Eigen::Index>(bank.size());
    RealVector diag(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double v = bank.variances[static_cast<std::size_t>(i)];
        if (!(v > 0.0) || !std::isfinite(v)) {
            raise(ErrorCode::InvalidVariance, "squeezer " + std::to_string(i) + " has non-positive variance");
        }
        diag(i) = v;
        diag(m + i) = 1.0 / v;
    }
    return GaussianState(RealVector::Zero(2 * m), diag.asDiagonal());
}

SymplecticTransform symplectic_from_unitary(const ComplexMatrix &unitary) {
    if (unitary.rows() == 0 || unitary.rows() != unitary.cols()) {
        raise(ErrorCode::DimensionError, "unitary must be square and non-empty");
    }
    const auto m = unitary.rows();
    const double defect = (unitary * unitary.adjoint() - ComplexMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
    if (defect > kUnitaryTolerance) {
        raise(ErrorCode::NotUnitary, "matrix deviates from unitarity by " + std::to_string(defect));
    }
    RealMatrix o(2 * m, 2 * m);
    o.topLeftCorner(m, m) = unitary.real();
    o.topRightCorner(m, m) = -unitary.imag();
    o.bottomLeftCorner(m, m) = unitary.imag();
    o.bottomRightCorner(m, m) = unitary.real();
    return SymplecticTransform(std::move(o), unitary);
}

GaussianState transform_state(const GaussianState &state, const SymplecticTransform &transform) {
    if (state.mode_count() != transform.mode_count()) {
        raise(ErrorCode::DimensionError, "state has " + std::to_string(state.mode_count()) +
                                             " modes, transform acts on " + std::to_string(transform.mode_count()));
    }
    const RealMatrix &o = transform.matrix();
    RealMatrix cov = o * state.cov() * o.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return GaussianState(o * state.mean(), std::move(cov));
}

PurityReport check_purity(const GaussianState &state) {
    const RealMatrix omega = symplectic_form(state.mode_count());
    PurityReport report;
    report.residual = (state.cov() * omega * state.cov() - omega).cwiseAbs().maxCoeff();
    report.pure = report.residual <= kPurityTolerance;
    return report;
}

RealVector symplectic_spectrum(const GaussianState &state) {
    const RealMatrix omega = symplectic_form(state.mode_count());
    const ComplexMatrix m = Complex(0.0, 1.0) * (omega * state.cov()).cast<Complex>();
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
    RealVector values = solver.eigenvalues().cwiseAbs();
    std::sort(values.data(), values.data() + values.size());
    return values;
}

nlohmann::json to_json(const GaussianState &state) {
    nlohmann::json j;
    j["mode_count"] = state.mode_count();
    j["mean"] = std::vector<double>(state.mean().data(), state.mean().data() + state.mean().size());
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < state.cov().rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(state.cov().cols()));
        for (Eigen::Index c = 0; c < state.cov().cols(); ++c) row[static_cast<std::size_t>(c)] = state.cov()(r, c);
        rows.push_back(row);
    }
    j["cov"] = std::move(rows);
    return j;
}

GaussianState gaussian_state_from_json(const nlohmann::json &j) {
    try {
        const auto m = j.at("mode_count").get<std::size_t>();
        const auto mean = j.at("mean").get<std::vector<double>>();
        const auto rows = j.at("cov").get<std::vector<std::vector<double>>>();
        if (mean.size() != 2 * m || rows.size() != 2 * m) {
            raise(ErrorCode::DimensionError, "serialized state does not match mode_count");
        }
        RealMatrix cov(2 * m, 2 * m);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != 2 * m) raise(ErrorCode::DimensionError, "ragged covariance row");
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
        }
        return GaussianState(Eigen::Map<const RealVector>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                             std::move(cov));
    } catch (const nlohmann::json::exception &e) {
        raise(ErrorCode::ConfigError, std::string("malformed state JSON: ") + e.what());
    }
}

}  // namespace gqcr
