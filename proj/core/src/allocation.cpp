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

#include "gqcr/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "gqcr/error.hpp"
#include "gqcr/fisher.hpp"
#include "gqcr/json_io.hpp"
#include "gqcr/random.hpp"

namespace gqcr {

namespace {

constexpr double kAttainmentGap = 1e-6;
constexpr double kAttainmentAlignment = 1.0 - 1e-4;

}  // namespace

AllocationReport evaluate_allocation(const AllocationProblem &problem) {
    const GaussianState input = make_squeezed_bank(problem.bank);
    if (problem.network.mode_count() != input.mode_count()) {
        raise(ErrorCode::DimensionError, "network and squeezer bank differ in mode count");
    }
    if (problem.detection_index >= input.mode_count()) {
        raise(ErrorCode::DimensionError, "detection index outside the network");
    }
    if (!problem.network.is_passive()) {
        raise(ErrorCode::PassiveRequired, "optimality certificate only holds for passive networks");
    }
    const GaussianState state = transform_state(input, problem.network);
    const auto d = static_cast<Eigen::Index>(problem.detection_index);

    AllocationReport r;
    r.gamma_inv_11 = inverse_diagonal_entry(state.cov(), d);
    const double sigma_min_sq = problem.bank.min_variance();
    r.spectral_radius = 1.0 / sigma_min_sq;
    r.gap = r.spectral_radius - r.gamma_inv_11;
    r.optimal = r.gap <= kOptimalGap;

    const Eigen::LLT<RealMatrix> llt(state.cov());
    const RealMatrix inverse = llt.solve(RealMatrix::Identity(state.cov().rows(), state.cov().cols()));
    r.max_inverse_diagonal = inverse.diagonal().maxCoeff();

    // Weight of the measured quadrature in the sigma_min^2 eigenspace.
    const Eigen::SelfAdjointEigenSolver<RealMatrix> eig(state.cov());
    const double cutoff = sigma_min_sq * (1.0 + 1e-9);
    double alignment = 0.0;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        if (eig.eigenvalues()(k) <= cutoff) alignment += eig.eigenvectors()(d, k) * eig.eigenvectors()(d, k);
    }
    r.eigenmode_alignment = std::min(alignment, 1.0);
    return r;
}

std::pair<SymplecticTransform, AllocationReport> optimize_allocation(const SqueezerBank &bank,
                                                                     std::size_t detection_index) {
    if (bank.variances.empty()) raise(ErrorCode::InvalidVariance, "squeezer bank is empty");
    if (detection_index >= bank.size()) raise(ErrorCode::DimensionError, "detection index outside the bank");
    const auto best = static_cast<std::size_t>(
        std::distance(bank.variances.begin(), std::min_element(bank.variances.begin(), bank.variances.end())));
    const auto m = static_cast<Eigen::Index>(bank.size());
    ComplexMatrix u = ComplexMatrix::Identity(m, m);
    if (best != detection_index) {
        const auto a = static_cast<Eigen::Index>(best);
        const auto b = static_cast<Eigen::Index>(detection_index);
        u(a, a) = u(b, b) = 0.0;
        u(a, b) = u(b, a) = 1.0;
    }
    SymplecticTransform network = symplectic_from_unitary(u);
    AllocationReport report = evaluate_allocation({bank, network, detection_index});
    return {std::move(network), report};
}

AuditReport random_network_audit(const SqueezerBank &bank, std::int64_t trials, std::uint64_t seed,
                                 std::size_t detection_index, unsigned threads) {
    if (trials < 1) raise(ErrorCode::InvalidArgument, "audit needs at least one trial");
    AuditReport audit;
    audit.trials = trials;
    audit.seed = seed;
    audit.detection_index = detection_index;
    audit.optimal_gamma_inv_11 = optimize_allocation(bank, detection_index).second.gamma_inv_11;
    audit.spectral_radius = 1.0 / bank.min_variance();
    audit.per_trial.resize(static_cast<std::size_t>(trials));

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            CounterRng rng(seed, t);
            const SymplecticTransform network = symplectic_from_unitary(haar_unitary(bank.size(), rng));
            const AllocationReport r = evaluate_allocation({bank, network, detection_index});
            audit.per_trial[t] = {r.eigenmode_alignment, r.gamma_inv_11, r.max_inverse_diagonal};
        }
    };
    const auto count = static_cast<std::size_t>(trials);
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers == 1) {
        worker(0, count);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
    }

    for (const AuditTrial &t : audit.per_trial) {
        audit.max_gamma_inv_11 = std::max(audit.max_gamma_inv_11, t.gamma_inv_11);
        audit.max_inverse_diagonal = std::max(audit.max_inverse_diagonal, t.max_inverse_diagonal);
        if (t.max_inverse_diagonal > audit.spectral_radius + kBoundSlack) ++audit.bound_violations;
        if (audit.spectral_radius - t.gamma_inv_11 <= kAttainmentGap * audit.spectral_radius) {
            ++audit.near_attainments;
            if (t.eigenmode_alignment < kAttainmentAlignment) ++audit.misaligned_attainments;
        }
    }
    audit.passed = audit.bound_violations == 0 && audit.misaligned_attainments == 0 &&
                   audit.max_gamma_inv_11 <= audit.optimal_gamma_inv_11 + kBoundSlack;
    return audit;
}

nlohmann::json to_json(const AllocationReport &r) {
    return {{"gamma_inv_11", r.gamma_inv_11},
            {"spectral_radius", r.spectral_radius},
            {"gap", r.gap},
            {"optimal", r.optimal},
            {"eigenmode_alignment", r.eigenmode_alignment},
            {"max_inverse_diagonal", r.max_inverse_diagonal}};
}

nlohmann::json to_json(const AuditReport &a) {
    return {{"trials", a.trials},
            {"seed", a.seed},
            {"detection_index", a.detection_index},
            {"spectral_radius", a.spectral_radius},
            {"optimal_gamma_inv_11", a.optimal_gamma_inv_11},
            {"max_gamma_inv_11", a.max_gamma_inv_11},
            {"max_inverse_diagonal", a.max_inverse_diagonal},
            {"bound_violations", a.bound_violations},
            {"near_attainments", a.near_attainments},
            {"misaligned_attainments", a.misaligned_attainments},
            {"passed", a.passed}};
}

std::string audit_csv(const AuditReport &a) {
    std::ostringstream out;
    out << "trial,alignment,gamma_inv_11\n";
    for (std::size_t t = 0; t < a.per_trial.size(); ++t) {
        out << t << ',' << format_double(a.per_trial[t].eigenmode_alignment) << ','
            << format_double(a.per_trial[t].gamma_inv_11) << '\n';
    }
    return out.str();
}

}  // namespace gqcr
