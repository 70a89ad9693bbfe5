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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "gqcr/error.hpp"
#include "gqcr/json_io.hpp"

namespace gqcr {

void HomodyneConfig::validate() const {
    if (std::abs(norm(lo_mode) - 1.0) > kOrthonormalTolerance) {
        raise(ErrorCode::InvalidArgument, "local-oscillator mode must have unit norm");
    }
    if (!(lo_photons > 0.0) || !std::isfinite(lo_photons)) {
        raise(ErrorCode::InvalidArgument, "local-oscillator photon number must be positive");
    }
    if (!std::isfinite(lo_phase)) raise(ErrorCode::InvalidArgument, "local-oscillator phase must be finite");
    if (samples < 1) raise(ErrorCode::InvalidArgument, "samples must be at least 1");
}

double homodyne_mean(const ComplexField &a_bar, const HomodyneConfig &lo) {
    const Complex overlap = std::polar(1.0, -lo.lo_phase) * inner_product(lo.lo_mode, a_bar);
    return 2.0 * std::sqrt(lo.lo_photons) * overlap.real();
}

QuadratureMarginal homodyne_marginal(const ModelState &state, const HomodyneConfig &lo) {
    const auto m = static_cast<Eigen::Index>(state.basis.size());
    RealVector g(2 * m);
    double captured = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const Complex c = std::polar(1.0, -lo.lo_phase) * inner_product(lo.lo_mode, state.basis[static_cast<std::size_t>(j)]);
        g(j) = c.real();
        g(m + j) = -c.imag();
        captured += std::norm(c);
    }
    const double outside = std::max(0.0, 1.0 - captured);
    QuadratureMarginal q;
    q.mean = homodyne_mean(state.mean_field, lo);
    q.variance = lo.lo_photons * (g.dot(state.cov * g) + outside);
    return q;
}

QuadratureMarginal detection_marginal(const GaussianState &state, const HomodyneConfig &lo) {
    const auto m = static_cast<Eigen::Index>(state.mode_count());
    RealVector g = RealVector::Zero(2 * m);
    g(0) = std::cos(lo.lo_phase);
    g(m) = std::sin(lo.lo_phase);
    QuadratureMarginal q;
    q.mean = std::sqrt(lo.lo_photons) * g.dot(state.mean());
    q.variance = lo.lo_photons * g.dot(state.cov() * g);
    return q;
}

void sample_marginal(const QuadratureMarginal &marginal, std::span<double> out, CounterRng &rng) {
    std::normal_distribution<double> normal(marginal.mean, std::sqrt(marginal.variance));
    for (double &v : out) v = normal(rng);
}

std::vector<double> sample_homodyne(const GaussianState &state, const HomodyneConfig &lo, std::size_t count,
                                    CounterRng &rng) {
    if (count < 1) raise(ErrorCode::InvalidArgument, "sample count must be at least 1");
    if (!(lo.lo_photons > 0.0)) raise(ErrorCode::InvalidArgument, "local-oscillator photon number must be positive");
    std::vector<double> out(count);
    sample_marginal(detection_marginal(state, lo), out, rng);
    return out;
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 64;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

LoModeSpec LoModeSpec::from_json(const nlohmann::json &j) {
    LoModeSpec spec;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "detection") {
            spec.kind = Kind::Detection;
        } else if (s == "mean_field") {
            spec.kind = Kind::MeanField;
        } else {
            raise(ErrorCode::ConfigError, "unknown lo.mode '" + s + "'");
        }
        return spec;
    }
    if (j.is_object()) {
        reject_unknown_keys(j, {"hg"}, "lo.mode");
        if (!j.contains("hg") || !j.at("hg").is_number_integer() || j.at("hg").get<int>() < 0) {
            raise(ErrorCode::ConfigError, "lo.mode.hg must be a non-negative integer");
        }
        spec.kind = Kind::HermiteGauss;
        spec.order = j.at("hg").get<int>();
        return spec;
    }
    raise(ErrorCode::ConfigError, "lo.mode must be \"detection\", \"mean_field\" or {\"hg\": n}");
}

nlohmann::json LoModeSpec::to_json() const {
    switch (kind) {
        case Kind::Detection: return "detection";
        case Kind::MeanField: return "mean_field";
        case Kind::HermiteGauss: return {{"hg", order}};
    }
    return nullptr;
}

std::string LoModeSpec::label() const {
    switch (kind) {
        case Kind::Detection: return "detection";
        case Kind::MeanField: return "mean_field";
        case Kind::HermiteGauss: return "hg" + std::to_string(order);
    }
    return "unknown";
}

ComplexField resolve_lo_mode(const LoModeSpec &spec, const ParametricFamily &family, const GridPtr &grid,
                             const Analysis &analysis) {
    switch (spec.kind) {
        case LoModeSpec::Kind::Detection:
            if (!analysis.detection) {
                raise(ErrorCode::ZeroDetectionMode, "model " + family.id() + " has no detection mode");
            }
            return analysis.detection->basis[0];
        case LoModeSpec::Kind::MeanField: return mean_field_mode(analysis.bundle.a_bar);
        case LoModeSpec::Kind::HermiteGauss: return hermite_gauss(spec.order, family.length_scale(), 0.0, grid);
    }
    raise(ErrorCode::InvalidArgument, "unknown LO mode kind");
}

namespace {

struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations
};

Moments combine(const Moments &a, const Moments &b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments r;
    r.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    r.mean = a.mean + delta * (b.count / r.count);
    r.m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / r.count);
    return r;
}

// Fixed binary tree so the result does not depend on the thread layout.
Moments combine_range(std::span<const Moments> parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts[0];
    const std::size_t half = parts.size() / 2;
    return combine(combine_range(parts.first(half)), combine_range(parts.subspan(half)));
}

Moments moments_of(std::span<const double> values) {
    Moments m;
    m.count = static_cast<double>(values.size());
    m.mean = pairwise_sum(values) / m.count;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - m.mean) * (values[i] - m.mean);
    m.m2 = pairwise_sum(sq);
    return m;
}

}  // namespace

ExperimentReport run_experiment(const ParametricFamily &family, const GridPtr &grid, double theta_true,
                                const HomodyneConfig &cfg, const ExperimentOptions &options) {
    const Analysis analysis = analyze(family, grid, options.analysis);
    return run_experiment(family, grid, analysis, theta_true, cfg, options);
}

ExperimentReport run_experiment(const ParametricFamily &family, const GridPtr &grid, const Analysis &analysis,
                                double theta_true, const HomodyneConfig &cfg, const ExperimentOptions &options) {
    cfg.validate();
    if (options.repetitions < 1) raise(ErrorCode::InvalidArgument, "repetitions must be at least 1");
    const double a_prime_norm_sq = analysis.inputs.a_prime_norm_sq;
    if (!(std::sqrt(a_prime_norm_sq) > kZeroFieldThreshold)) {
        raise(ErrorCode::ZeroDetectionMode, "model " + family.id() + " leaves the mean field unchanged");
    }

    ExperimentReport r;
    r.theta_true = theta_true;
    r.samples = cfg.samples;
    r.repetitions = options.repetitions;
    r.lo_photons = cfg.lo_photons;
    r.lo_phase = cfg.lo_phase;
    r.i_zero = analysis.inputs.i_zero.value_or(4.0 * a_prime_norm_sq);
    r.d_zero = homodyne_mean(analysis.bundle.a_bar, cfg);
    r.signal_slope = homodyne_mean(analysis.bundle.a_bar_prime, cfg);

    const QuadratureMarginal marginal = homodyne_marginal(family.evaluate(theta_true, grid), cfg);
    const double normalization = std::sqrt(cfg.lo_photons * r.i_zero);

    const auto reps = static_cast<std::size_t>(options.repetitions);
    const auto samples = static_cast<std::size_t>(cfg.samples);
    std::vector<Moments> per_rep(reps);
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(reps)));
    auto worker = [&](std::size_t begin, std::size_t end) {
        std::vector<double> draws(samples);
        for (std::size_t rep = begin; rep < end; ++rep) {
            CounterRng rng(cfg.seed, rep);
            sample_marginal(marginal, draws, rng);
            per_rep[rep] = moments_of(draws);
        }
    };
    if (threads == 1) {
        worker(0, reps);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (reps + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(reps, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
    }

    r.theta_estimates.resize(reps);
    r.signal_means.resize(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        r.signal_means[rep] = per_rep[rep].mean;
        r.theta_estimates[rep] = (per_rep[rep].mean - r.d_zero) / normalization;
    }
    const Moments est = moments_of(r.theta_estimates);
    r.estimates.mean = est.mean;
    r.estimates.std_dev = reps > 1 ? std::sqrt(est.m2 / (est.count - 1.0)) : 0.0;
    r.estimates.std_error = reps > 1 ? r.estimates.std_dev / std::sqrt(est.count) : 0.0;
    r.bias = r.estimates.mean - theta_true;
    r.bias_within_3se = reps > 1 && std::abs(r.bias) <= 3.0 * r.estimates.std_error;

    const Moments all = combine_range(per_rep);
    const double total = all.count;
    r.signal_std = total > 1.0 ? std::sqrt(all.m2 / (total - 1.0)) : 0.0;
    r.ratio_std_error = total > 1.0 ? 1.0 / std::sqrt(2.0 * (total - 1.0)) : 1.0;

    const double sqrt_q = std::sqrt(static_cast<double>(cfg.samples));
    r.qcr_delta_theta = analysis.report.delta_theta_min_single;
    r.qcr_delta_theta_q = r.qcr_delta_theta / sqrt_q;
    r.estimator_delta_theta = r.estimates.std_dev * sqrt_q;
    // The slope is linear in a'; anything below roundoff of the signal scale is zero.
    const double slope_floor = 1e-9 * 2.0 * std::sqrt(cfg.lo_photons * a_prime_norm_sq);
    r.divergent = !(std::abs(r.signal_slope) > slope_floor);
    if (r.divergent) {
        r.empirical_delta_theta = std::numeric_limits<double>::infinity();
    } else {
        r.empirical_delta_theta = r.signal_std / std::abs(r.signal_slope);
    }
    r.empirical_delta_theta_q = r.empirical_delta_theta / sqrt_q;
    r.ratio = r.empirical_delta_theta / r.qcr_delta_theta;
    r.cramer_rao_respected = r.ratio >= 1.0 - 3.0 * r.ratio_std_error;
    return r;
}

nlohmann::json to_json(const ExperimentReport &r) {
    return {{"theta_true", r.theta_true},
            {"samples", r.samples},
            {"repetitions", r.repetitions},
            {"lo_photons", r.lo_photons},
            {"lo_phase", r.lo_phase},
            {"estimates",
             {{"mean", r.estimates.mean}, {"std_dev", r.estimates.std_dev}, {"std_error", r.estimates.std_error}}},
            {"bias", r.bias},
            {"bias_within_3se", r.bias_within_3se},
            {"d_zero", r.d_zero},
            {"i_zero", r.i_zero},
            {"signal_slope", r.signal_slope},
            {"signal_std", r.signal_std},
            {"divergent", r.divergent},
            {"per_sample",
             {{"empirical_delta_theta", r.empirical_delta_theta},
              {"estimator_delta_theta", r.estimator_delta_theta},
              {"qcr_delta_theta", r.qcr_delta_theta}}},
            {"per_estimate",
             {{"q", r.samples},
              {"empirical_delta_theta", r.empirical_delta_theta_q},
              {"qcr_delta_theta", r.qcr_delta_theta_q}}},
            {"ratio", r.ratio},
            {"ratio_std_error", r.ratio_std_error},
            {"cramer_rao_respected", r.cramer_rao_respected}};
}

std::string repetition_csv(const ExperimentReport &r) {
    std::ostringstream out;
    out << "repetition,signal_mean,theta_estimate\n";
    for (std::size_t i = 0; i < r.theta_estimates.size(); ++i) {
        out << i << ',' << format_double(r.signal_means[i]) << ',' << format_double(r.theta_estimates[i]) << '\n';
    }
    return out.str();
}

}  // namespace gqcr
