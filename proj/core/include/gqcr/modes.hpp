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

// Discretized mode functions on a 1-D transverse grid and the mean-field and
// detection-mode constructions built on top of them.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gqcr/gaussian.hpp"

namespace gqcr {

using ComplexVector = Eigen::VectorXcd;

inline constexpr double kOrthonormalTolerance = 1e-8;
inline constexpr double kZeroFieldThreshold = 1e-12;
inline constexpr double kPivotThreshold = 1e-10;
inline constexpr double kMinPointsPerWaist = 16.0;

class Grid {
   public:
    /// points strictly increasing, weights positive, equal lengths.
    Grid(RealVector points, RealVector weights);

    /// Uniform samples on [min, max] with trapezoid weights.
    static std::shared_ptr<const Grid> uniform(double min, double max, std::size_t count);
    /// Trapezoid weights over arbitrary strictly increasing points.
    static std::shared_ptr<const Grid> trapezoid(RealVector points);

    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.size()); }
    const RealVector &points() const noexcept { return points_; }
    const RealVector &weights() const noexcept { return weights_; }
    double max_spacing() const noexcept { return max_spacing_; }

    bool same_as(const Grid &other) const;

   private:
    RealVector points_;
    RealVector weights_;
    double max_spacing_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

class ComplexField {
   public:
    ComplexField(GridPtr grid, ComplexVector values);

    static ComplexField zeros(GridPtr grid);

    const GridPtr &grid() const noexcept { return grid_; }
    const ComplexVector &values() const noexcept { return values_; }

    ComplexField &operator+=(const ComplexField &other);
    ComplexField &operator-=(const ComplexField &other);
    ComplexField &operator*=(Complex scale);

    friend ComplexField operator+(ComplexField a, const ComplexField &b) { return a += b; }
    friend ComplexField operator-(ComplexField a, const ComplexField &b) { return a -= b; }
    friend ComplexField operator*(Complex s, ComplexField a) { return a *= s; }
    friend ComplexField operator*(ComplexField a, Complex s) { return a *= s; }

   private:
    GridPtr grid_;
    ComplexVector values_;
};

/// Throws GridError if the two fields are not sampled on the same grid.
void require_same_grid(const ComplexField &f, const ComplexField &g);

/// sum_k w_k conj(f_k) g_k
Complex inner_product(const ComplexField &f, const ComplexField &g);
double norm_sq(const ComplexField &f);
double norm(const ComplexField &f);

class ModeBasis {
   public:
    /// Requires a shared grid and |<v_i, v_j> - delta_ij| <= 1e-8.
    explicit ModeBasis(std::vector<ComplexField> modes);

    std::size_t size() const noexcept { return modes_.size(); }
    const ComplexField &operator[](std::size_t i) const { return modes_[i]; }
    const std::vector<ComplexField> &modes() const noexcept { return modes_; }
    const GridPtr &grid() const { return modes_.front().grid(); }

    ComplexMatrix gram() const;

   private:
    std::vector<ComplexField> modes_;
};

/// n-th Hermite-Gauss function, HG_0 ~ exp(-(x - center)^2 / waist^2),
/// normalized to unit norm on the grid.
ComplexField hermite_gauss(int n, double waist, double center, const GridPtr &grid);

ModeBasis hermite_gauss_basis(std::size_t count, double waist, double center, const GridPtr &grid);

/// a_bar / ||a_bar||.
ComplexField mean_field_mode(const ComplexField &a_bar);

struct SeedLadder {
    double waist = 1.0;
    double center = 0.0;
};

/// Detection basis whose first mode is a_bar_prime / ||a_bar_prime|| and
/// whose remaining modes come from pivoted Gram-Schmidt over the Hermite-Gauss
/// ladder n = 0..M+4.
ModeBasis build_detection_basis(const ComplexField &a_bar_prime, std::size_t target_size,
                                const SeedLadder &ladder = {});

/// Same, completing from an explicit candidate list.
ModeBasis build_detection_basis(const ComplexField &a_bar_prime, std::size_t target_size,
                                std::span<const ComplexField> candidates);

/// Mean quadratures (x_1..x_M, p_1..p_M) of a coherent amplitude field in a
/// basis: x_i = 2 Re<v_i, a>, p_i = 2 Im<v_i, a>.
RealVector mean_quadratures(const ComplexField &field, const ModeBasis &basis);

/// U_ij = <to_i, from_j>; unitary when both bases span the same subspace.
ComplexMatrix basis_change(const ModeBasis &to, const ModeBasis &from);

/// CSV with header "coordinate,re,im".
void write_field_csv(const std::filesystem::path &path, const ComplexField &field);
ComplexField read_field_csv(const std::filesystem::path &path);

}  // namespace gqcr
