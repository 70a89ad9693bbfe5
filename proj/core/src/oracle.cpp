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

#include "gqcr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gqcr/error.hpp"
#include "gqcr/fisher.hpp"
#include "gqcr/json_io.hpp"

namespace gqcr {

namespace {

constexpr double kCoverageTolerance = 1e-8;
constexpr double kUnitDeterminantTolerance = 1e-8;
constexpr double kMaxOverlapDeficit = 0.01;
constexpr double kTargetDeficit = 1e-4;
// Roundoff level of the closed-form deficit for identical states.
constexpr double kNegligibleDeficit = 1e-14;

void require_pure(const GaussianState &s, std::string_view which) {
    const PurityReport p = check_purity(s);
    if (!p.pure) {
        raise(ErrorCode::PurityError, std::string(which) + " is not pure (residual " + std::to_string(p.residual) + ")");
    }
    // The Wigner normalization used by the overlap formula assumes det = 1.
    Eigen::LLT<RealMatrix> llt(s.cov());
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    if (std::abs(logdet) > kUnitDeterminantTolerance) {
        raise(ErrorCode::PurityError, std::string(which) + " does not have unit determinant");
    }
}

double bures_from_overlap(double overlap_sq, double deficit) {
    // 1 - sqrt(1 - d) = d / (1 + sqrt(1 - d))
    const double fidelity = std::sqrt(std::max(overlap_sq, 0.0));
    const double gap = deficit / (1.0 + fidelity);
    return std::sqrt(std::max(2.0 * gap, 0.0));
}

double tail_mass(const GaussianState &s, double center_x, double center_p, double box) {
    double tail = 0.0;
    const double centers[2] = {center_x, center_p};
    for (int axis = 0; axis < 2; ++axis) {
        const double sigma = std::sqrt(s.cov()(axis, axis));
        const double mu = s.mean()(axis);
        const double hi = (centers[axis] + box - mu) / (std::numbers::sqrt2 * sigma);
        const double lo = (mu - centers[axis] + box) / (std::numbers::sqrt2 * sigma);
        tail += 0.5 * std::erfc(hi) + 0.5 * std::erfc(lo);
    }
    return tail;
}

struct SymmetricDeficit {
    double deficit;
    double worst;  // larger of the two one-sided deficits
};

SymmetricDeficit symmetric_deficit(const ParametricFamily &family, const GridPtr &grid, const GaussianState &origin,
                                   double h) {
    const OverlapResult plus = overlap_closed_form(origin, family.evaluate(h, grid).gaussian());
    const OverlapResult minus = overlap_closed_form(origin, family.evaluate(-h, grid).gaussian());
    return {0.5 * (plus.deficit + minus.deficit), std::max(plus.deficit, minus.deficit)};
}

}  // namespace

OverlapResult overlap_closed_form(const GaussianState &s1, const GaussianState &s2) {
    if (s1.mode_count() != s2.mode_count()) raise(ErrorCode::DimensionError, "states have different mode counts");
    require_pure(s1, "first state");
    require_pure(s2, "second state");
    const RealMatrix sum = s1.cov() + s2.cov();
    const Eigen::LLT<RealMatrix> llt(sum);
    const auto lower = llt.matrixL();
    const double logdet = 2.0 * lower.toDenseMatrix().diagonal().array().log().sum();
    const RealVector delta = s1.mean() - s2.mean();
    const double quad = lower.solve(delta).squaredNorm();
    const double log_overlap =
        static_cast<double>(s1.mode_count()) * std::numbers::ln2 - 0.5 * logdet - 0.5 * quad;
    OverlapResult r;
    r.method = OverlapMethod::ClosedForm;
    r.overlap_sq = std::exp(log_overlap);
    r.deficit = -std::expm1(log_overlap);
    r.bures_distance = bures_from_overlap(r.overlap_sq, r.deficit);
    return r;
}

OverlapResult overlap_grid(const GaussianState &s1, const GaussianState &s2, double box, int points_per_axis) {
    if (s1.mode_count() != 1 || s2.mode_count() != 1) {
        raise(ErrorCode::UnsupportedDimension, "grid overlap is implemented for single-mode states only");
    }
    if (points_per_axis < 64) raise(ErrorCode::InvalidArgument, "grid overlap needs at least 64 points per axis");
    if (!(box > 0.0)) raise(ErrorCode::InvalidArgument, "box half-width must be positive");
    require_pure(s1, "first state");
    require_pure(s2, "second state");

    const double cx = 0.5 * (s1.mean()(0) + s2.mean()(0));
    const double cp = 0.5 * (s1.mean()(1) + s2.mean()(1));
    const double tail = tail_mass(s1, cx, cp, box) + tail_mass(s2, cx, cp, box);
    if (tail > kCoverageTolerance) {
        raise(ErrorCode::CoverageError, "phase-space box misses probability mass " + std::to_string(tail));
    }

    const Eigen::Matrix2d p1 = s1.cov().inverse();
    const Eigen::Matrix2d p2 = s2.cov().inverse();
    const double norm1 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(s1.cov().determinant()));
    const double norm2 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(s2.cov().determinant()));
    const double dx = 2.0 * box / points_per_axis;

    // Midpoint rule; each row is summed separately and rows are then added,
    // which keeps the accumulation error well below the tolerance.
    double total = 0.0;
    for (int i = 0; i < points_per_axis; ++i) {
        const double x = cx - box + (i + 0.5) * dx;
        double row = 0.0;
        for (int j = 0; j < points_per_axis; ++j) {
            const double p = cp - box + (j + 0.5) * dx;
            const double a0 = x - s1.mean()(0), a1 = p - s1.mean()(1);
            const double b0 = x - s2.mean()(0), b1 = p - s2.mean()(1);
            const double q1 = p1(0, 0) * a0 * a0 + 2.0 * p1(0, 1) * a0 * a1 + p1(1, 1) * a1 * a1;
            const double q2 = p2(0, 0) * b0 * b0 + 2.0 * p2(0, 1) * b0 * b1 + p2(1, 1) * b1 * b1;
            row += std::exp(-0.5 * (q1 + q2));
        }
        total += row;
    }
    OverlapResult r;
    r.method = OverlapMethod::GridIntegration;
    r.overlap_sq = 4.0 * std::numbers::pi * norm1 * norm2 * total * dx * dx;
    r.deficit = 1.0 - r.overlap_sq;
    r.bures_distance = bures_from_overlap(r.overlap_sq, r.deficit);
    return r;
}

GridPlan plan_overlap_grid(const GaussianState &s1, const GaussianState &s2) {
    if (s1.mode_count() != 1 || s2.mode_count() != 1) {
        raise(ErrorCode::UnsupportedDimension, "grid overlap is implemented for single-mode states only");
    }
    const double cx = 0.5 * (s1.mean()(0) + s2.mean()(0));
    const double cp = 0.5 * (s1.mean()(1) + s2.mean()(1));
    double box = 0.0;
    for (const GaussianState *s : {&s1, &s2}) {
        box = std::max(box, std::abs(s->mean()(0) - cx) + 7.0 * std::sqrt(s->cov()(0, 0)));
        box = std::max(box, std::abs(s->mean()(1) - cp) + 7.0 * std::sqrt(s->cov()(1, 1)));
    }
    // Resolve the narrowest direction of the product W1 W2.
    const Eigen::Matrix2d precision = s1.cov().inverse() + s2.cov().inverse();
    const double max_precision = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(precision).eigenvalues().maxCoeff();
    const double narrowest = 1.0 / std::sqrt(max_precision);
    const double dx = narrowest / 2.5;
    const int points = std::clamp(static_cast<int>(std::ceil(2.0 * box / dx)), 64, 8192);
    return {box, points};
}

double qfi_from_overlap(const ParametricFamily &family, const GridPtr &grid, double h) {
    if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "overlap step must be positive");
    const GaussianState origin = family.evaluate(0.0, grid).gaussian();
    const SymmetricDeficit full = symmetric_deficit(family, grid, origin, h);
    if (full.worst >= kMaxOverlapDeficit) {
        raise(ErrorCode::StepTooLarge, "overlap deficit " + std::to_string(full.worst) + " at step " +
                                           std::to_string(h) + " exceeds 0.01");
    }
    const SymmetricDeficit half = symmetric_deficit(family, grid, origin, 0.5 * h);
    const double coarse = 4.0 * full.deficit / (h * h);
    const double fine = 4.0 * half.deficit / (0.25 * h * h);
    return (4.0 * fine - coarse) / 3.0;
}

double qfi_from_overlap_auto(const ParametricFamily &family, const GridPtr &grid) {
    const double max_step = 0.5 * family.domain_bound();
    const GaussianState origin = family.evaluate(0.0, grid).gaussian();
    double h = std::min(1e-2, max_step);
    SymmetricDeficit d = symmetric_deficit(family, grid, origin, h);
    if (!(d.deficit > kNegligibleDeficit)) {
        h = max_step;
        d = symmetric_deficit(family, grid, origin, h);
        if (!(d.deficit > kNegligibleDeficit)) raise(ErrorCode::NoInformation, "state does not change with theta");
    }
    for (int iter = 0; iter < 4; ++iter) {
        h = std::min(max_step, h * std::sqrt(kTargetDeficit / d.deficit));
        d = symmetric_deficit(family, grid, origin, h);
        if (d.deficit > 0.3 * kTargetDeficit && d.deficit < 3.0 * kTargetDeficit) break;
    }
    while (d.worst >= kMaxOverlapDeficit) {
        h *= 0.5;
        d = symmetric_deficit(family, grid, origin, h);
    }
    return qfi_from_overlap(family, grid, h);
}

double bures_bound(const ParametricFamily &family, const GridPtr &grid, double h, std::int64_t q) {
    if (q < 1) raise(ErrorCode::InvalidArgument, "repetition count Q must be at least 1");
    const OverlapResult r =
        overlap_closed_form(family.evaluate(0.0, grid).gaussian(), family.evaluate(h, grid).gaussian());
    if (!(r.bures_distance > 0.0)) raise(ErrorCode::NoInformation, "states at 0 and h coincide");
    return h / (2.0 * std::sqrt(static_cast<double>(q)) * r.bures_distance);
}

OracleCase compare_routes(const std::string &case_id, const ParametricFamily &family, const GridPtr &grid) {
    OracleCase c;
    c.case_id = case_id;
    try {
        c.i_fisher_direct = analyze(family, grid).report.i_full;
    } catch (const Error &e) {
        if (e.code() != ErrorCode::NoInformation) throw;
        c.skipped = true;
        c.note = "no information";
        return c;
    }
    c.i_fisher_overlap = qfi_from_overlap_auto(family, grid);
    c.rel_err = std::abs(c.i_fisher_overlap - c.i_fisher_direct) / std::abs(c.i_fisher_direct);
    return c;
}

std::string oracle_csv_header() { return "case_id,i_fisher_direct,i_fisher_overlap,rel_err"; }

std::string oracle_csv_row(const OracleCase &c) {
    std::ostringstream out;
    out << c.case_id << ',';
    if (c.skipped) {
        out << "skipped,skipped,skipped";
    } else {
        out << format_double(c.i_fisher_direct) << ',' << format_double(c.i_fisher_overlap) << ','
            << format_double(c.rel_err);
    }
    return out.str();
}

}  // namespace gqcr
