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

// Pure multimode Gaussian states in quadrature phase space.
//
// Conventions: x = a + a^dagger, p = i(a^dagger - a), so the vacuum has unit
// quadrature variance and covariance matrix equal to the identity. Phase-space
// vectors are blocked as (x_1..x_M, p_1..p_M).

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace gqcr {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPurityTolerance = 1e-9;
inline constexpr double kSymplecticTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Symplectic form [[0, I], [-I, 0]] for M modes in blocked ordering.
RealMatrix symplectic_form(std::size_t mode_count);

/// Quadrature variance for a squeezing level given in dB (10^(-dB/10)).
double db_to_variance(double db);

class GaussianState {
   public:
    /// Validates shape, symmetry (1e-12) and positive definiteness. Purity is
    /// a separate diagnostic; see check_purity.
    GaussianState(RealVector mean, RealMatrix cov);

    static GaussianState vacuum(std::size_t mode_count);

    std::size_t mode_count() const noexcept { return mode_count_; }
    const RealVector &mean() const noexcept { return mean_; }
    const RealMatrix &cov() const noexcept { return cov_; }

   private:
    std::size_t mode_count_;
    RealVector mean_;
    RealMatrix cov_;
};

class SymplecticTransform {
   public:
    /// Rejects matrices with |O Omega O^T - Omega| above 1e-10 (scaled by the
    /// matrix norm), the same slack accepted for unitaries.
    explicit SymplecticTransform(RealMatrix matrix, std::optional<ComplexMatrix> origin = std::nullopt);

    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(matrix_.rows() / 2); }
    const RealMatrix &matrix() const noexcept { return matrix_; }
    const std::optional<ComplexMatrix> &origin() const noexcept { return origin_; }

    /// Orthogonal as well as symplectic, i.e. a linear-optics network.
    bool is_passive(double tolerance = kUnitaryTolerance) const;

    SymplecticTransform inverse() const;

   private:
    RealMatrix matrix_;
    std::optional<ComplexMatrix> origin_;
};

struct SqueezerBank {
    std::vector<double> variances;

    static SqueezerBank from_db(const std::vector<double> &db_levels);

    double min_variance() const;
    std::size_t size() const noexcept { return variances.size(); }
};

struct PurityReport {
    double residual = 0.0;
    bool pure = false;
};

/// Product of independent single-mode squeezers, squeezed along x.
GaussianState make_squeezed_bank(const SqueezerBank &bank);

/// O = [[Re U, -Im U], [Im U, Re U]] for a_out = U a_in.
SymplecticTransform symplectic_from_unitary(const ComplexMatrix &unitary);

GaussianState transform_state(const GaussianState &state, const SymplecticTransform &transform);

PurityReport check_purity(const GaussianState &state);

/// Moduli of the eigenvalues of i Omega Gamma, sorted ascending. Each
/// symplectic eigenvalue appears twice.
RealVector symplectic_spectrum(const GaussianState &state);

nlohmann::json to_json(const GaussianState &state);
GaussianState gaussian_state_from_json(const nlohmann::json &j);

}  // namespace gqcr
