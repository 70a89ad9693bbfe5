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
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "gqcr/error.hpp"
#include "gqcr/json_io.hpp"

namespace gqcr {

Grid::Grid(RealVector points, RealVector weights) : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() < 2) raise(ErrorCode::GridError, "grid needs at least two points");
    if (points_.size() != weights_.size()) raise(ErrorCode::GridError, "points and weights differ in length");
    for (Eigen::Index k = 0; k < points_.size(); ++k) {
        if (!std::isfinite(points_(k))) raise(ErrorCode::GridError, "non-finite grid point");
        if (!(weights_(k) > 0.0)) raise(ErrorCode::GridError, "grid weights must be positive");
        if (k > 0) {
            const double gap = points_(k) - points_(k - 1);
            if (!(gap > 0.0)) raise(ErrorCode::GridError, "grid points must be strictly increasing");
            max_spacing_ = std::max(max_spacing_, gap);
        }
    }
}

std::shared_ptr<const Grid> Grid::uniform(double min, double max, std::size_t count) {
    if (count < 2 || !(max > min)) raise(ErrorCode::GridError, "uniform grid needs count >= 2 and max > min");
    RealVector points = RealVector::LinSpaced(static_cast<Eigen::Index>(count), min, max);
    return trapezoid(std::move(points));
}

std::shared_ptr<const Grid> Grid::trapezoid(RealVector points) {
    const auto n = points.size();
    if (n < 2) raise(ErrorCode::GridError, "grid needs at least two points");
    RealVector weights(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double left = k > 0 ? points(k) - points(k - 1) : 0.0;
        const double right = k + 1 < n ? points(k + 1) - points(k) : 0.0;
        weights(k) = 0.5 * (left + right);
    }
    return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

bool Grid::same_as(const Grid &other) const {
    if (this == &other) return true;
    return points_.size() == other.points_.size() && points_ == other.points_ && weights_ == other.weights_;
}

ComplexField::ComplexField(GridPtr grid, ComplexVector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) raise(ErrorCode::GridError, "field has no grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size()) {
        raise(ErrorCode::GridError, "field length does not match its grid");
    }
    if (!values_.allFinite()) raise(ErrorCode::InvalidArgument, "field contains non-finite values");
}

ComplexField ComplexField::zeros(GridPtr grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return ComplexField(std::move(grid), ComplexVector::Zero(n));
}

ComplexField &ComplexField::operator+=(const ComplexField &other) {
    require_same_grid(*this, other);
    values_ += other.values_;
    return *this;
}

ComplexField &ComplexField::operator-=(const ComplexField &other) {
    require_same_grid(*this, other);
    values_ -= other.values_;
    return *this;
}

ComplexField &ComplexField::operator*=(Complex scale) {
    values_ *= scale;
    return *this;
}

void require_same_grid(const ComplexField &f, const ComplexField &g) {
    if (f.grid() != g.grid() && !f.grid()->same_as(*g.grid())) {
        raise(ErrorCode::GridError, "fields are sampled on different grids");
    }
}

Complex inner_product(const ComplexField &f, const ComplexField &g) {
    require_same_grid(f, g);
    const auto &w = f.grid()->weights();
    Complex sum(0.0, 0.0);
    for (Eigen::Index k = 0; k < w.size(); ++k) sum += w(k) * std::conj(f.values()(k)) * g.values()(k);
    return sum;
}

double norm_sq(const ComplexField &f) {
    const auto &w = f.grid()->weights();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) sum += w(k) * std::norm(f.values()(k));
    return sum;
}

double norm(const ComplexField &f) { return std::sqrt(norm_sq(f)); }

ModeBasis::ModeBasis(std::vector<ComplexField> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) raise(ErrorCode::BasisDeficient, "basis must contain at least one mode");
    for (std::size_t i = 1; i < modes_.size(); ++i) require_same_grid(modes_[0], modes_[i]);
    const ComplexMatrix g = gram();
    const auto n = g.rows();
    const double defect = (g - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > kOrthonormalTolerance) {
        raise(ErrorCode::BasisDeficient, "modes are not orthonormal (Gram defect " + std::to_string(defect) + ")");
    }
}

ComplexMatrix ModeBasis::gram() const {
    const auto n = static_cast<Eigen::Index>(modes_.size());
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            g(i, j) = inner_product(modes_[static_cast<std::size_t>(i)], modes_[static_cast<std::size_t>(j)]);
        }
    }
    return g;
}

ComplexField hermite_gauss(int n, double waist, double center, const GridPtr &grid) {
    if (n < 0) raise(ErrorCode::InvalidArgument, "Hermite-Gauss order must be non-negative");
    if (!(waist > 0.0)) raise(ErrorCode::InvalidArgument, "waist must be positive");
    if (!grid) raise(ErrorCode::GridError, "null grid");
    if (grid->max_spacing() * kMinPointsPerWaist > waist * (1.0 + 1e-12)) {
        raise(ErrorCode::ResolutionError, "grid spacing " + std::to_string(grid->max_spacing()) +
                                              " does not resolve waist " + std::to_string(waist) +
                                              " with 16 points per waist");
    }
    const auto &x = grid->points();
    ComplexVector values(x.size());
    // Normalized Hermite functions phi_n(t) in t = sqrt(2)(x - c)/w via the
    // stable three-term recurrence.
    const double norm0 = std::pow(std::numbers::pi, -0.25);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double t = std::numbers::sqrt2 * (x(k) - center) / waist;
        double prev = 0.0;
        double cur = norm0 * std::exp(-0.5 * t * t);
        for (int j = 0; j < n; ++j) {
            const double next = std::sqrt(2.0 / (j + 1)) * t * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
            prev = cur;
            cur = next;
        }
        values(k) = Complex(cur, 0.0);
    }
    ComplexField field(grid, std::move(values));
    const double nrm = norm(field);
    if (!(nrm > 0.0)) raise(ErrorCode::ResolutionError, "Hermite-Gauss mode vanishes on the grid");
    field *= Complex(1.0 / nrm, 0.0);
    return field;
}

ModeBasis hermite_gauss_basis(std::size_t count, double waist, double center, const GridPtr &grid) {
    std::vector<ComplexField> modes;
    modes.reserve(count);
    for (std::size_t n = 0; n < count; ++n) modes.push_back(hermite_gauss(static_cast<int>(n), waist, center, grid));
    // Grid normalization leaves tiny cross terms; one Gram-Schmidt sweep clears them.
    for (std::size_t i = 0; i < modes.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) modes[i] -= inner_product(modes[j], modes[i]) * modes[j];
        modes[i] *= Complex(1.0 / norm(modes[i]), 0.0);
    }
    return ModeBasis(std::move(modes));
}

ComplexField mean_field_mode(const ComplexField &a_bar) {
    const double nrm = norm(a_bar);
    if (!(nrm > kZeroFieldThreshold)) raise(ErrorCode::ZeroMeanField, "mean field has vanishing norm");
    return a_bar * Complex(1.0 / nrm, 0.0);
}

namespace {

ComplexField project_out(ComplexField v, const std::vector<ComplexField> &basis) {
    // Two classical Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto &b : basis) v -= inner_product(b, v) * b;
    }
    return v;
}

}  // namespace

ModeBasis build_detection_basis(const ComplexField &a_bar_prime, std::size_t target_size, const SeedLadder &ladder) {
    std::vector<ComplexField> seeds;
    seeds.reserve(target_size + 5);
    for (std::size_t n = 0; n < target_size + 5; ++n) {
        seeds.push_back(hermite_gauss(static_cast<int>(n), ladder.waist, ladder.center, a_bar_prime.grid()));
    }
    return build_detection_basis(a_bar_prime, target_size, seeds);
}

ModeBasis build_detection_basis(const ComplexField &a_bar_prime, std::size_t target_size,
                                std::span<const ComplexField> candidates) {
    if (target_size < 1) raise(ErrorCode::InvalidArgument, "basis size must be at least 1");
    const double nrm = norm(a_bar_prime);
    if (!(nrm > kZeroFieldThreshold)) {
        raise(ErrorCode::ZeroDetectionMode, "derivative of the mean field vanishes; theta does not move the mean field");
    }
    std::vector<ComplexField> modes;
    modes.reserve(target_size);
    modes.push_back(a_bar_prime * Complex(1.0 / nrm, 0.0));

    std::vector<bool> used(candidates.size(), false);
    while (modes.size() < target_size) {
        std::size_t best = candidates.size();
        double best_norm = 0.0;
        std::optional<ComplexField> best_residual;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (used[c]) continue;
            require_same_grid(a_bar_prime, candidates[c]);
            ComplexField r = project_out(candidates[c], modes);
            const double rn = norm(r);
            // Near-ties go to the lower candidate index.
            if (rn > best_norm * (1.0 + 1e-9)) {
                best = c;
                best_norm = rn;
                best_residual = std::move(r);
            }
        }
        if (best == candidates.size() || best_norm < kPivotThreshold) {
            raise(ErrorCode::BasisDeficient, "only " + std::to_string(modes.size()) +
                                                 " independent modes available, " + std::to_string(target_size) +
                                                 " requested");
        }
        used[best] = true;
        ComplexField v = project_out(*best_residual * Complex(1.0 / best_norm, 0.0), modes);
        v *= Complex(1.0 / norm(v), 0.0);
        modes.push_back(std::move(v));
    }
    return ModeBasis(std::move(modes));
}

RealVector mean_quadratures(const ComplexField &field, const ModeBasis &basis) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    RealVector out(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Complex c = inner_product(basis[static_cast<std::size_t>(i)], field);
        out(i) = 2.0 * c.real();
        out(m + i) = 2.0 * c.imag();
    }
    return out;
}

ComplexMatrix basis_change(const ModeBasis &to, const ModeBasis &from) {
    ComplexMatrix u(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
    for (std::size_t i = 0; i < to.size(); ++i) {
        for (std::size_t j = 0; j < from.size(); ++j) {
            u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inner_product(to[i], from[j]);
        }
    }
    return u;
}

void write_field_csv(const std::filesystem::path &path, const ComplexField &field) {
    std::ostringstream out;
    out << "coordinate,re,im\n";
    const auto &x = field.grid()->points();
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        out << format_double(x(k)) << ',' << format_double(field.values()(k).real()) << ','
            << format_double(field.values()(k).imag()) << '\n';
    }
    write_text_file(path, out.str());
}

ComplexField read_field_csv(const std::filesystem::path &path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("coordinate,re,im", 0) != 0) {
        raise(ErrorCode::IoError, path.string() + ": expected header coordinate,re,im");
    }
    std::vector<double> xs;
    std::vector<Complex> vs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            raise(ErrorCode::IoError, path.string() + ":" + std::to_string(line_no) + ": expected three columns");
        }
        try {
            xs.push_back(std::stod(a));
            vs.emplace_back(std::stod(b), std::stod(c));
        } catch (const std::exception &) {
            raise(ErrorCode::IoError, path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    auto grid = Grid::trapezoid(Eigen::Map<const RealVector>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    return ComplexField(std::move(grid),
                        Eigen::Map<const ComplexVector>(vs.data(), static_cast<Eigen::Index>(vs.size())));
}

}  // namespace gqcr
