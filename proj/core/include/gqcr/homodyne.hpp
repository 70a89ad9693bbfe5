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

// Monte Carlo balanced homodyne detection with a strong local oscillator.
// Outcomes are drawn from the Gaussian marginal of the quadrature selected by
// the local-oscillator mode and phase, scaled by sqrt(N_LO).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gqcr/fisher.hpp"
#include "gqcr/models.hpp"
#include "gqcr/modes.hpp"
#include "gqcr/random.hpp"
#include "json.hpp"

namespace gqcr {

inline constexpr double kDefaultLoPhotons = 1e8;

struct HomodyneConfig {
    ComplexField lo_mode;
    double lo_photons = kDefaultLoPhotons;
    double lo_phase = 0.0;  // 0 measures the x quadrature of lo_mode
    std::int64_t samples = 1;
    std::uint64_t seed = 42;

    /// lo_mode unit norm to 1e-8, positive N_LO, samples >= 1.
    void validate() const;
};

struct QuadratureMarginal {
    double mean = 0.0;
    double variance = 0.0;
};

/// 2 sqrt(N_LO) Re(e^{-i phase} <lo, a>).
double homodyne_mean(const ComplexField &a_bar, const HomodyneConfig &lo);

/// Outcome distribution for an arbitrary LO against a family state. LO
/// components outside the family's basis see vacuum noise.
QuadratureMarginal homodyne_marginal(const ModelState &state, const HomodyneConfig &lo);

/// Outcome distribution when the LO is mode 1 of the state's basis.
QuadratureMarginal detection_marginal(const GaussianState &state, const HomodyneConfig &lo);

void sample_marginal(const QuadratureMarginal &marginal, std::span<double> out, CounterRng &rng);

/// count draws of the homodyne signal for a state written in a basis whose
/// first mode is the LO mode.
std::vector<double> sample_homodyne(const GaussianState &state, const HomodyneConfig &lo, std::size_t count,
                                    CounterRng &rng);

/// Blocked pairwise summation.
double pairwise_sum(std::span<const double> values);

struct LoModeSpec {
    enum class Kind { Detection, MeanField, HermiteGauss };
    Kind kind = Kind::Detection;
    int order = 0;

    static LoModeSpec from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;
    std::string label() const;
};

ComplexField resolve_lo_mode(const LoModeSpec &spec, const ParametricFamily &family, const GridPtr &grid,
                             const Analysis &analysis);

struct EstimateSummary {
    double mean = 0.0;
    double std_dev = 0.0;
    double std_error = 0.0;
};

struct ExperimentReport {
    double theta_true = 0.0;
    std::int64_t samples = 0;
    std::int64_t repetitions = 0;
    double lo_photons = 0.0;
    double lo_phase = 0.0;

    EstimateSummary estimates;  // theta estimates over repetitions
    double bias = 0.0;
    bool bias_within_3se = false;

    double d_zero = 0.0;         // calibration offset, <D> at theta = 0
    double i_zero = 0.0;         // coherent information used to normalize
    double signal_slope = 0.0;   // d<D>/dtheta at theta = 0
    double signal_std = 0.0;     // single-shot std of D pooled over all draws
    bool divergent = false;      // LO insensitive to theta

    // Per single sample and per estimate (Q = samples).
    double empirical_delta_theta = 0.0;
    double empirical_delta_theta_q = 0.0;
    double estimator_delta_theta = 0.0;  // std of estimates times sqrt(samples)
    double qcr_delta_theta = 0.0;
    double qcr_delta_theta_q = 0.0;
    double ratio = 0.0;
    double ratio_std_error = 0.0;  // relative standard error of the std estimate
    bool cramer_rao_respected = false;

    std::vector<double> theta_estimates;
    std::vector<double> signal_means;
};

struct ExperimentOptions {
    std::int64_t repetitions = 1;
    unsigned threads = 1;
    AnalysisOptions analysis;
};

/// Calibrates D0 from the model, draws samples x repetitions outcomes at
/// theta_true and compares the spread with the quantum Cramer-Rao bound.
ExperimentReport run_experiment(const ParametricFamily &family, const GridPtr &grid, double theta_true,
                                const HomodyneConfig &cfg, const ExperimentOptions &options);

/// Same, with the analysis already computed.
ExperimentReport run_experiment(const ParametricFamily &family, const GridPtr &grid, const Analysis &analysis,
                                double theta_true, const HomodyneConfig &cfg, const ExperimentOptions &options);

nlohmann::json to_json(const ExperimentReport &report);
std::string repetition_csv(const ExperimentReport &report);

}  // namespace gqcr
