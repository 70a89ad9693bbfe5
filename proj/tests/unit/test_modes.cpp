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

#include "gqcr/modes.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace gqcr;

namespace {

GridPtr default_grid() { return Grid::uniform(-8.0, 8.0, 1024); }

double gram_error(const ModeBasis &basis) {
    return (basis.gram() - ComplexMatrix::Identity(static_cast<Eigen::Index>(basis.size()),
                                                   static_cast<Eigen::Index>(basis.size())))
        .cwiseAbs()
        .maxCoeff();
}

}  // namespace

TEST(modes, grid_validation) {
    RealVector pts(3);
    pts << 0.0, 1.0, 1.0;
    EXPECT_GQCR_ERROR(GridError, Grid(pts, RealVector::Ones(3)));
    pts << 0.0, 1.0, 2.0;
    RealVector w(3);
    w << 1.0, 0.0, 1.0;
    EXPECT_GQCR_ERROR(GridError, Grid(pts, w));
    EXPECT_GQCR_ERROR(GridError, Grid(pts, RealVector::Ones(2)));
}

TEST(modes, gaussian_integration_resolution) {
    // int exp(-x^2) dx = sqrt(pi)
    const GridPtr grid = default_grid();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < grid->points().size(); ++k) {
        sum += grid->weights()(k) * std::exp(-grid->points()(k) * grid->points()(k));
    }
    EXPECT_LT(std::abs(sum / std::sqrt(std::numbers::pi) - 1.0), 1e-8);
}

TEST(modes, hermite_gauss_orthonormal) {
    const GridPtr grid = default_grid();
    const ComplexField hg0 = hermite_gauss(0, 1.0, 0.0, grid);
    const ComplexField hg1 = hermite_gauss(1, 1.0, 0.0, grid);
    EXPECT_NEAR(std::abs(inner_product(hg0, hg0) - Complex(1.0)), 0.0, 1e-8);
    EXPECT_LT(std::abs(inner_product(hg0, hg1)), 1e-8);
    const ModeBasis ladder = hermite_gauss_basis(10, 1.3, 0.2, grid);
    EXPECT_LT(gram_error(ladder), 1e-8);
}

TEST(modes, shifted_gaussian_overlap) {
    const GridPtr grid = default_grid();
    const Complex ov = inner_product(hermite_gauss(0, 1.0, 0.5, grid), hermite_gauss(0, 1.0, 0.0, grid));
    EXPECT_NEAR(ov.real(), std::exp(-0.125), 1e-8);
    EXPECT_NEAR(ov.imag(), 0.0, 1e-15);
}

TEST(modes, inner_product_conjugate_symmetric) {
    const GridPtr grid = default_grid();
    const ComplexField f = Complex(0.3, 1.2) * hermite_gauss(0, 1.0, 0.1, grid) + hermite_gauss(2, 1.0, 0.0, grid);
    const ComplexField g = Complex(-0.7, 0.4) * hermite_gauss(1, 0.8, -0.3, grid);
    EXPECT_NEAR(std::abs(inner_product(f, g) - std::conj(inner_product(g, f))), 0.0, 1e-15);
}

TEST(modes, grid_mismatch) {
    const ComplexField a = hermite_gauss(0, 1.0, 0.0, default_grid());
    const ComplexField b = hermite_gauss(0, 1.0, 0.0, Grid::uniform(-8.0, 8.0, 1000));
    EXPECT_GQCR_ERROR(GridError, inner_product(a, b));
}

TEST(modes, same_grid_by_value) {
    const ComplexField a = hermite_gauss(0, 1.0, 0.0, default_grid());
    const ComplexField b = hermite_gauss(1, 1.0, 0.0, default_grid());
    EXPECT_LT(std::abs(inner_product(a, b)), 1e-8);
}

TEST(modes, hermite_gauss_derivative_norm) {
    const GridPtr grid = Grid::uniform(-16.0, 16.0, 2048);
    for (double w : {0.5, 1.0, 2.0}) {
        const double h = 1e-4;
        const ComplexField d =
            (hermite_gauss(0, w, h, grid) - hermite_gauss(0, w, -h, grid)) * Complex(1.0 / (2.0 * h));
        EXPECT_NEAR(norm(d), 1.0 / w, 1e-6) << "w=" << w;
    }
}

TEST(modes, hermite_gauss_resolution_error) {
    EXPECT_GQCR_ERROR(ResolutionError, hermite_gauss(0, 0.05, 0.0, default_grid()));
}

TEST(modes, mean_field_mode_examples) {
    const GridPtr grid = default_grid();
    const ComplexField hg0 = hermite_gauss(0, 1.0, 0.0, grid);
    const ComplexField hg1 = hermite_gauss(1, 1.0, 0.0, grid);

    const ComplexField u1 = mean_field_mode(Complex(3.0) * hg0);
    EXPECT_LT((u1.values() - hg0.values()).cwiseAbs().maxCoeff(), 1e-12);

    const ComplexField u2 = mean_field_mode(Complex(1.0, 1.0) * hg0);
    EXPECT_LT((u2.values() - Complex(1.0, 1.0) / std::numbers::sqrt2 * hg0.values()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(norm(u2), 1.0, 1e-10);

    const ComplexField u3 = mean_field_mode(Complex(2.0) * hg0 + hg1);
    const ComplexVector expected = (2.0 * hg0.values() + hg1.values()) / std::sqrt(5.0);
    EXPECT_LT((u3.values() - expected).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(norm(u3), 1.0, 1e-10);

    EXPECT_GQCR_ERROR(ZeroMeanField, mean_field_mode(ComplexField::zeros(grid)));
}

TEST(modes, detection_basis_displacement) {
    const GridPtr grid = default_grid();
    const ComplexField hg1 = hermite_gauss(1, 1.0, 0.0, grid);
    const ModeBasis basis = build_detection_basis(hg1, 4);
    ASSERT_EQ(basis.size(), 4u);
    EXPECT_LT((basis[0].values() - hg1.values()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(gram_error(basis), 1e-8);
    // The completion must pick HG0 first: it has the largest residual.
    EXPECT_NEAR(std::abs(inner_product(hermite_gauss(0, 1.0, 0.0, grid), basis[1])), 1.0, 1e-8);
}

TEST(modes, detection_basis_phase) {
    const GridPtr grid = default_grid();
    const ComplexField ihg0 = Complex(0.0, 1.0) * hermite_gauss(0, 1.0, 0.0, grid);
    const ModeBasis basis = build_detection_basis(Complex(10.0) * ihg0, 3);
    EXPECT_LT((basis[0].values() - ihg0.values()).cwiseAbs().maxCoeff(), 1e-12);
    const Complex c = inner_product(basis[0], Complex(10.0) * ihg0);
    EXPECT_GT(c.real(), 0.0);
    EXPECT_NEAR(c.imag(), 0.0, 1e-12);
    EXPECT_LT(gram_error(basis), 1e-8);
}

TEST(modes, detection_basis_superposition) {
    const GridPtr grid = default_grid();
    const ComplexField v =
        (hermite_gauss(0, 1.0, 0.0, grid) + hermite_gauss(1, 1.0, 0.0, grid)) * Complex(1.0 / std::numbers::sqrt2);
    const ModeBasis basis = build_detection_basis(v, 5);
    EXPECT_LT((basis[0].values() - v.values()).cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t i = 1; i < basis.size(); ++i) EXPECT_LT(std::abs(inner_product(basis[0], basis[i])), 1e-8);
}

TEST(modes, detection_basis_errors) {
    const GridPtr grid = default_grid();
    EXPECT_GQCR_ERROR(ZeroDetectionMode, build_detection_basis(ComplexField::zeros(grid), 2));
    const ComplexField hg0 = hermite_gauss(0, 1.0, 0.0, grid);
    std::vector<ComplexField> candidates{hg0, Complex(2.0) * hg0};
    EXPECT_GQCR_ERROR(BasisDeficient, build_detection_basis(hg0, 2, candidates));
}

TEST(modes, detection_basis_deterministic) {
    const GridPtr grid = default_grid();
    const ComplexField v = Complex(0.3, -0.2) * hermite_gauss(0, 1.0, 0.4, grid) + hermite_gauss(3, 1.0, 0.0, grid);
    const ModeBasis a = build_detection_basis(v, 6);
    const ModeBasis b = build_detection_basis(v, 6);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].values() == b[i].values());
}

TEST(modes, mean_quadratures_and_basis_change) {
    const GridPtr grid = default_grid();
    const ModeBasis ladder = hermite_gauss_basis(3, 1.0, 0.0, grid);
    const ComplexField a = Complex(1.0, 2.0) * ladder[0] + Complex(-0.5, 0.0) * ladder[2];
    const RealVector x = mean_quadratures(a, ladder);
    RealVector expected(6);
    expected << 2.0, 0.0, -1.0, 4.0, 0.0, 0.0;
    EXPECT_LT((x - expected).cwiseAbs().maxCoeff(), 1e-10);

    const ModeBasis rotated = build_detection_basis(a, 3, ladder.modes());
    const ComplexMatrix u = basis_change(rotated, ladder);
    EXPECT_LT((u * u.adjoint() - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(modes, field_csv_round_trip) {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "gqcr_modes_test";
    std::filesystem::create_directories(dir);
    const GridPtr grid = Grid::uniform(-4.0, 4.0, 257);
    const ComplexField f = Complex(0.25, -1.5) * hermite_gauss(2, 0.9, 0.1, grid);
    write_field_csv(dir / "f.csv", f);
    const ComplexField back = read_field_csv(dir / "f.csv");
    EXPECT_TRUE(back.values() == f.values());
    EXPECT_TRUE(back.grid()->points() == grid->points());
    EXPECT_NEAR(std::abs(inner_product(back, back) - inner_product(f, f)), 0.0, 1e-12);
    std::filesystem::remove_all(dir);
}
