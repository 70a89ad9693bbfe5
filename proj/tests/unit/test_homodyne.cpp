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

#include "gqcr/homodyne.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace gqcr;
using gqcr::testing::rel_err;

namespace {

GridPtr default_grid() { return Grid::uniform(-8.0, 8.0, 1024); }

HomodyneConfig lo_config(ComplexField mode, double photons = kDefaultLoPhotons) {
    return HomodyneConfig{.lo_mode = std::move(mode), .lo_photons = photons};
}

double sample_variance(const std::vector<double> &v) {
    const double mean = pairwise_sum(v) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

ExperimentReport experiment(const ParametricFamily &family, double theta, std::int64_t reps, LoModeSpec spec = {},
                            double phase = 0.0, std::uint64_t seed = 42, unsigned threads = 1) {
    const GridPtr grid = default_grid();
    const Analysis analysis = analyze(family, grid, {.derivatives = DerivativeMode::Analytic});
    HomodyneConfig cfg = lo_config(resolve_lo_mode(spec, family, grid, analysis));
    cfg.lo_phase = phase;
    cfg.seed = seed;
    return run_experiment(family, grid, analysis, theta, cfg, {.repetitions = reps, .threads = threads});
}

}  // namespace

TEST(homodyne, mean_examples) {
    const GridPtr grid = default_grid();
    const ComplexField u0 = hermite_gauss(0, 1.0, 0.0, grid);

    const ModelState phase = PhaseFamily(100.0).evaluate(0.0, grid);
    EXPECT_NEAR(homodyne_mean(phase.mean_field, lo_config(u0 * Complex(0.0, 1.0), 1.0)), 0.0, 1e-12);

    const ModelState amp = AmplitudeFamily(100.0, 1.0).evaluate(0.0, grid);
    const double nlo = 1e6;
    EXPECT_NEAR(homodyne_mean(amp.mean_field, lo_config(u0, nlo)), 20.0 * std::sqrt(nlo), 1e-9 * std::sqrt(nlo));
    // Linearized form: sqrt(N_LO) 2 N' / sqrt(I0) with N' = 200, I0 = 400.
    EXPECT_NEAR(homodyne_mean(amp.mean_field, lo_config(u0, nlo)), std::sqrt(nlo) * 2.0 * 200.0 / 20.0, 1e-6);

    const ModelState disp = DisplacementFamily(100.0).evaluate(0.1, grid);
    const ComplexField hg1 = hermite_gauss(1, 1.0, 0.0, grid);
    const double d = homodyne_mean(disp.mean_field, lo_config(hg1, 1.0));
    EXPECT_LT(std::abs(d / (2.0 * 10.0 * 0.1) - 1.0), 0.01);
}

TEST(homodyne, sampling_variances) {
    const std::size_t count = 1000000;
    const HomodyneConfig vac{.lo_mode = hermite_gauss(0, 1.0, 0.0, default_grid()), .lo_photons = 1.0};
    CounterRng rng(1, 0);
    EXPECT_LT(rel_err(sample_variance(sample_homodyne(GaussianState::vacuum(1), vac, count, rng)), 1.0), 0.005);

    const GaussianState sq = make_squeezed_bank({{0.25}});
    HomodyneConfig lo{.lo_mode = vac.lo_mode, .lo_photons = 1e4};
    CounterRng rng2(1, 1);
    EXPECT_LT(rel_err(sample_variance(sample_homodyne(sq, lo, count, rng2)), 0.25e4), 0.005);
    lo.lo_phase = std::numbers::pi / 2.0;
    CounterRng rng3(1, 2);
    EXPECT_LT(rel_err(sample_variance(sample_homodyne(sq, lo, count, rng3)), 4e4), 0.005);
}

TEST(homodyne, sampling_is_deterministic) {
    const HomodyneConfig lo{.lo_mode = hermite_gauss(0, 1.0, 0.0, default_grid()), .lo_photons = 1.0};
    CounterRng a(9, 3), b(9, 3), c(9, 4);
    const auto x = sample_homodyne(GaussianState::vacuum(1), lo, 100, a);
    EXPECT_EQ(x, sample_homodyne(GaussianState::vacuum(1), lo, 100, b));
    EXPECT_NE(x, sample_homodyne(GaussianState::vacuum(1), lo, 100, c));
}

TEST(homodyne, marginal_agrees_with_detection_frame) {
    const GridPtr grid = default_grid();
    const RotatedSqueezedFamily family(100.0, 0.3);
    const Analysis a = analyze(family, grid, {.derivatives = DerivativeMode::Analytic});
    const HomodyneConfig lo = lo_config(a.detection->basis[0], 1e4);
    const ModelState s = family.evaluate(0.0, grid);
    const QuadratureMarginal general = homodyne_marginal(s, lo);
    const RealVector mean_det = symplectic_from_unitary(a.detection->unitary).matrix() * s.gaussian().mean();
    const QuadratureMarginal det = detection_marginal(GaussianState(mean_det, a.detection->cov), lo);
    EXPECT_NEAR(general.mean, det.mean, 1e-8);
    EXPECT_NEAR(general.variance, det.variance, 1e-8);
    // The squeezed quadrature is x of u0, so the detection mode i u0 sees 1 / s.
    EXPECT_NEAR(det.variance / 1e4, 1.0 / 0.3, 1e-12);
}

TEST(homodyne, lo_outside_basis_sees_vacuum) {
    const GridPtr grid = default_grid();
    const ModelState s = PhaseFamily(100.0, 1.0, 0.1).evaluate(0.0, grid);
    const QuadratureMarginal q = homodyne_marginal(s, lo_config(hermite_gauss(3, 1.0, 0.0, grid), 1.0));
    EXPECT_NEAR(q.variance, 1.0, 1e-9);
    EXPECT_NEAR(q.mean, 0.0, 1e-9);
}

TEST(homodyne, config_validation) {
    const GridPtr grid = default_grid();
    HomodyneConfig cfg = lo_config(hermite_gauss(0, 1.0, 0.0, grid) * Complex(2.0));
    EXPECT_GQCR_ERROR(InvalidArgument, cfg.validate());
    cfg = lo_config(hermite_gauss(0, 1.0, 0.0, grid), 0.0);
    EXPECT_GQCR_ERROR(InvalidArgument, cfg.validate());
    cfg = lo_config(hermite_gauss(0, 1.0, 0.0, grid));
    cfg.samples = 0;
    EXPECT_GQCR_ERROR(InvalidArgument, cfg.validate());
}

TEST(homodyne, coherent_phase_saturates) {
    const ExperimentReport r = experiment(PhaseFamily(100.0), 0.01, 100000);
    EXPECT_TRUE(r.bias_within_3se) << r.bias << " vs " << r.estimates.std_error;
    EXPECT_LT(std::abs(r.empirical_delta_theta / 0.05 - 1.0), 0.02);
    EXPECT_GE(r.ratio, 0.98);
    EXPECT_LE(r.ratio, 1.02);
    EXPECT_TRUE(r.cramer_rao_respected);
}

TEST(homodyne, squeezed_phase_saturates) {
    const ExperimentReport r = experiment(PhaseFamily(100.0, 1.0, 0.25), 0.01, 100000);
    EXPECT_TRUE(r.bias_within_3se);
    EXPECT_LT(std::abs(r.empirical_delta_theta / 0.025 - 1.0), 0.02);
}

TEST(homodyne, unbiased_at_origin) {
    const ExperimentReport r = experiment(PhaseFamily(100.0), 0.0, 100000);
    EXPECT_TRUE(r.bias_within_3se);
    EXPECT_NEAR(r.d_zero, 0.0, 1e-9);
}

TEST(homodyne, repetitions_average_samples) {
    const GridPtr grid = default_grid();
    const DisplacementFamily family(1e6);
    const Analysis a = analyze(family, grid, {.derivatives = DerivativeMode::Analytic});
    HomodyneConfig cfg = lo_config(a.detection->basis[0]);
    cfg.samples = 100;
    const ExperimentReport r = run_experiment(family, grid, a, 1e-4, cfg, {.repetitions = 2000});
    EXPECT_TRUE(r.bias_within_3se);
    EXPECT_NEAR(r.qcr_delta_theta_q, 5e-5, 1e-15);
    // Spread of estimates over repetitions, scaled back to one sample.
    EXPECT_LT(std::abs(r.estimator_delta_theta / 5e-4 - 1.0), 0.05);
    EXPECT_LT(std::abs(r.empirical_delta_theta / 5e-4 - 1.0), 0.02);
}

TEST(homodyne, thread_layout_does_not_change_results) {
    const PhaseFamily family(100.0, 1.0, 0.5);
    const ExperimentReport one = experiment(family, 0.02, 1001, {}, 0.0, 7, 1);
    const ExperimentReport four = experiment(family, 0.02, 1001, {}, 0.0, 7, 4);
    EXPECT_EQ(one.theta_estimates, four.theta_estimates);
    EXPECT_EQ(one.signal_std, four.signal_std);
    EXPECT_EQ(one.estimates.mean, four.estimates.mean);
    const ExperimentReport other_seed = experiment(family, 0.02, 1001, {}, 0.0, 8, 1);
    EXPECT_NE(one.theta_estimates, other_seed.theta_estimates);
}

TEST(homodyne, mismatched_lo_is_insensitive) {
    const ExperimentReport r = experiment(DisplacementFamily(1e6), 0.0, 1000, {LoModeSpec::Kind::HermiteGauss, 2});
    EXPECT_TRUE(r.divergent);
    EXPECT_TRUE(std::isinf(r.empirical_delta_theta));
    EXPECT_TRUE(r.cramer_rao_respected);
    EXPECT_LT(std::abs(r.signal_slope), 1e-6);
}

TEST(homodyne, suboptimal_lo_respects_bound) {
    const PhaseFamily family(100.0, 1.0, 0.25);
    for (double phase : {0.1, 0.4, 1.0}) {
        const ExperimentReport r = experiment(family, 0.0, 20000, {}, phase);
        EXPECT_TRUE(r.cramer_rao_respected) << phase;
        EXPECT_GT(r.ratio, 1.0) << phase;
    }
}

TEST(homodyne, zero_detection_mode) {
    EXPECT_GQCR_ERROR(ZeroDetectionMode, experiment(SqueezeParamFamily(), 0.0, 10, {LoModeSpec::Kind::HermiteGauss, 0}));
}

TEST(homodyne, lo_spec_json) {
    EXPECT_EQ(LoModeSpec::from_json("detection").kind, LoModeSpec::Kind::Detection);
    EXPECT_EQ(LoModeSpec::from_json("mean_field").kind, LoModeSpec::Kind::MeanField);
    const LoModeSpec hg = LoModeSpec::from_json({{"hg", 2}});
    EXPECT_EQ(hg.order, 2);
    EXPECT_EQ(hg.label(), "hg2");
    EXPECT_EQ(LoModeSpec::from_json(hg.to_json()).order, 2);
    EXPECT_GQCR_ERROR(ConfigError, LoModeSpec::from_json("nope"));
    EXPECT_GQCR_ERROR(ConfigError, LoModeSpec::from_json({{"hg", -1}}));
    EXPECT_GQCR_ERROR(ConfigError, LoModeSpec::from_json({{"hg", 1}, {"waist", 2}}));
}

TEST(homodyne, pairwise_sum_accuracy) {
    std::vector<double> v(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(v), 0.1 * static_cast<double>(v.size()), 1e-8);
    EXPECT_EQ(pairwise_sum(std::span<const double>()), 0.0);
}

TEST(homodyne, repetition_csv_shape) {
    const ExperimentReport r = experiment(PhaseFamily(100.0), 0.0, 3);
    const std::string csv = repetition_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "repetition,signal_mean,theta_estimate");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
