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

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "gqcr/fisher.hpp"
#include "gqcr/random.hpp"
#include "test_util.hpp"

using namespace gqcr;

namespace {

SymplecticTransform identity(std::size_t m) {
    return symplectic_from_unitary(ComplexMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
}

SymplecticTransform beamsplitter(double angle = std::numbers::pi / 4.0) {
    ComplexMatrix u(2, 2);
    u << std::cos(angle), std::sin(angle), std::sin(angle), -std::cos(angle);
    return symplectic_from_unitary(u);
}

}  // namespace

TEST(allocation, identity_network_is_optimal) {
    const AllocationReport r = evaluate_allocation({{{0.25, 1.0}}, identity(2), 0});
    EXPECT_DOUBLE_EQ(r.gamma_inv_11, 4.0);
    EXPECT_DOUBLE_EQ(r.spectral_radius, 4.0);
    EXPECT_TRUE(r.optimal);
    EXPECT_NEAR(r.eigenmode_alignment, 1.0, 1e-12);
}

TEST(allocation, beamsplitter_is_not_optimal) {
    const AllocationReport r = evaluate_allocation({{{0.25, 1.0}}, beamsplitter(), 0});
    EXPECT_NEAR(r.gamma_inv_11, 2.5, 1e-12);
    EXPECT_FALSE(r.optimal);
    EXPECT_NEAR(r.eigenmode_alignment, 0.5, 1e-12);
    EXPECT_NEAR(r.gap, 1.5, 1e-12);
}

TEST(allocation, vacuum_bank_is_always_optimal) {
    CounterRng rng(3, 0);
    for (int t = 0; t < 10; ++t) {
        const AllocationReport r =
            evaluate_allocation({{{1.0, 1.0}}, symplectic_from_unitary(haar_unitary(2, rng)), 0});
        EXPECT_NEAR(r.gamma_inv_11, 1.0, 1e-12);
        EXPECT_TRUE(r.optimal);
    }
}

TEST(allocation, active_network_rejected) {
    RealMatrix sq = RealMatrix::Identity(4, 4);
    sq(0, 0) = 0.5;
    sq(2, 2) = 2.0;
    EXPECT_GQCR_ERROR(PassiveRequired, evaluate_allocation({{{0.25, 1.0}}, SymplecticTransform(sq), 0}));
    EXPECT_GQCR_ERROR(DimensionError, evaluate_allocation({{{0.25, 1.0}}, identity(3), 0}));
    EXPECT_GQCR_ERROR(DimensionError, evaluate_allocation({{{0.25, 1.0}}, identity(2), 2}));
}

TEST(allocation, optimizer_examples) {
    {
        const auto [net, r] = optimize_allocation({{1.0, 0.25, 0.5}}, 0);
        EXPECT_DOUBLE_EQ(r.gamma_inv_11, 4.0);
        EXPECT_EQ(r.gap, 0.0);
        // Squeezer 2 routed to mode 1: x1 <- x2.
        EXPECT_EQ(net.matrix()(0, 1), 1.0);
        EXPECT_EQ(net.matrix()(1, 0), 1.0);
        EXPECT_EQ(net.matrix()(2, 2), 1.0);
    }
    {
        const auto [net, r] = optimize_allocation({{0.25}}, 0);
        EXPECT_EQ(net.matrix(), RealMatrix::Identity(2, 2));
        EXPECT_DOUBLE_EQ(r.gamma_inv_11, 4.0);
    }
    {
        const auto [net, r] = optimize_allocation({{0.5, 0.5}}, 0);
        EXPECT_EQ(net.matrix(), RealMatrix::Identity(4, 4));
        EXPECT_DOUBLE_EQ(r.gamma_inv_11, 2.0);
    }
}

TEST(allocation, optimizer_reaches_bound) {
    const SqueezerBank bank = SqueezerBank::from_db({6.0, 3.0, 0.0, 0.0});
    for (std::size_t d = 0; d < bank.size(); ++d) {
        const auto [net, r] = optimize_allocation(bank, d);
        EXPECT_LE(std::abs(r.gap), 1e-12 * r.spectral_radius) << d;
        EXPECT_TRUE(r.optimal);
    }
}

TEST(allocation, appending_modes_changes_nothing) {
    const double base = optimize_allocation(SqueezerBank::from_db({6.0, 3.0}), 0).second.gamma_inv_11;
    for (const auto &extra : std::vector<std::vector<double>>{{0.0}, {3.0, 3.0}, {5.9, 1.0, 0.0}}) {
        std::vector<double> db{6.0, 3.0};
        db.insert(db.end(), extra.begin(), extra.end());
        EXPECT_EQ(optimize_allocation(SqueezerBank::from_db(db), 0).second.gamma_inv_11, base);
    }
}

TEST(allocation, diagonal_never_exceeds_spectral_radius) {
    CounterRng rng(55, 0);
    std::uniform_real_distribution<double> level(0.0, 15.0);
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 1 + static_cast<std::size_t>(t % 5);
        std::vector<double> db(m);
        for (double &x : db) x = level(rng);
        const SqueezerBank bank = SqueezerBank::from_db(db);
        const AllocationReport r =
            evaluate_allocation({bank, symplectic_from_unitary(haar_unitary(m, rng)), static_cast<std::size_t>(t) % m});
        EXPECT_LE(r.max_inverse_diagonal, r.spectral_radius + kBoundSlack);
        EXPECT_GE(r.gap, -1e-10);
        EXPECT_GE(r.eigenmode_alignment, 0.0);
        EXPECT_LE(r.eigenmode_alignment, 1.0);
    }
}

TEST(allocation, entangling_strictly_decreases) {
    for (double angle : {0.01, 0.2, 0.7, 1.2}) {
        const AllocationReport r = evaluate_allocation({{{0.25, 1.0}}, beamsplitter(angle), 0});
        EXPECT_LT(r.eigenmode_alignment, 1.0);
        EXPECT_LT(r.gamma_inv_11, 4.0) << angle;
        EXPECT_FALSE(r.optimal);
    }
}

TEST(allocation, audit_examples) {
    const AuditReport two = random_network_audit({{0.25, 1.0}}, 1000, 11);
    EXPECT_TRUE(two.passed);
    EXPECT_LE(two.max_gamma_inv_11, 4.0);
    EXPECT_EQ(two.misaligned_attainments, 0);

    const AuditReport vac = random_network_audit({{1.0, 1.0, 1.0}}, 200, 12);
    EXPECT_TRUE(vac.passed);
    for (const AuditTrial &t : vac.per_trial) EXPECT_NEAR(t.gamma_inv_11, 1.0, 1e-12);

    const AuditReport degenerate = random_network_audit({{0.1, 0.1}}, 500, 13);
    EXPECT_TRUE(degenerate.passed);
    EXPECT_LE(degenerate.max_gamma_inv_11, 10.0 + kBoundSlack);
    for (const AuditTrial &t : degenerate.per_trial) {
        EXPECT_GT(t.gamma_inv_11, 0.1 - 1e-12);
    }
}

TEST(allocation, audit_is_thread_independent) {
    const SqueezerBank bank = SqueezerBank::from_db({6.0, 3.0, 0.0, 0.0});
    const AuditReport a = random_network_audit(bank, 257, 7, 0, 1);
    const AuditReport b = random_network_audit(bank, 257, 7, 0, 3);
    ASSERT_EQ(a.per_trial.size(), b.per_trial.size());
    for (std::size_t i = 0; i < a.per_trial.size(); ++i) {
        EXPECT_EQ(a.per_trial[i].gamma_inv_11, b.per_trial[i].gamma_inv_11);
        EXPECT_EQ(a.per_trial[i].eigenmode_alignment, b.per_trial[i].eigenmode_alignment);
    }
    EXPECT_EQ(audit_csv(a), audit_csv(b));
}

TEST(allocation, matches_fisher_pipeline) {
    // The same inverse entry drives the reduced Fisher information.
    const SqueezerBank bank = SqueezerBank::from_db({6.0, 3.0});
    const auto [net, r] = optimize_allocation(bank, 0);
    const GaussianState s = transform_state(make_squeezed_bank(bank), net);
    EXPECT_DOUBLE_EQ(qfi_reduced(1.0, s.cov()), 4.0 * r.gamma_inv_11);
}
