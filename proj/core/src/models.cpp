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

#include "gqcr/models.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "gqcr/error.hpp"
#include "gqcr/random.hpp"

namespace gqcr {

namespace {

void require_positive(double value, std::string_view name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        raise(ErrorCode::InvalidArgument, std::string(name) + " must be positive and finite");
    }
}

ModeBasis single_mode_basis(double waist, const GridPtr &grid) {
    return ModeBasis({hermite_gauss(0, waist, 0.0, grid)});
}

// Single mode, x squeezed to x_variance.
RealMatrix single_mode_cov(double x_variance) {
    RealMatrix cov = RealMatrix::Zero(2, 2);
    cov(0, 0) = x_variance;
    cov(1, 1) = 1.0 / x_variance;
    return cov;
}

RealMatrix rotation(double angle) {
    RealMatrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

ComplexField field_from_quadratures(const RealVector &quadratures, const ModeBasis &basis) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    ComplexField field = ComplexField::zeros(basis.grid());
    for (Eigen::Index i = 0; i < m; ++i) {
        const Complex alpha(0.5 * quadratures(i), 0.5 * quadratures(m + i));
        field += alpha * basis[static_cast<std::size_t>(i)];
    }
    return field;
}

}  // namespace

GaussianState ModelState::gaussian() const { return GaussianState(mean_quadratures(mean_field, basis), cov); }

std::optional<AnalyticDerivative> ParametricFamily::analytic_derivative(const GridPtr &) const { return std::nullopt; }

ModelState ParametricFamily::evaluate(double theta, const GridPtr &grid) const {
    if (!std::isfinite(theta) || std::abs(theta) > domain_bound()) {
        raise(ErrorCode::DomainError, "theta = " + std::to_string(theta) + " outside [-" +
                                          std::to_string(domain_bound()) + ", " + std::to_string(domain_bound()) +
                                          "] for model " + id());
    }
    return evaluate_at(theta, grid);
}

namespace {

struct CentralDifference {
    ComplexField a_prime;
    double n_prime;
    RealMatrix cov_prime;
    std::optional<ComplexField> u_prime;
};

CentralDifference central_difference(const ParametricFamily &family, const GridPtr &grid, double h) {
    const ModelState plus = family.evaluate(h, grid);
    const ModelState minus = family.evaluate(-h, grid);
    const double inv = 1.0 / (2.0 * h);
    CentralDifference d{(plus.mean_field - minus.mean_field) * Complex(inv, 0.0),
                        (norm_sq(plus.mean_field) - norm_sq(minus.mean_field)) * inv,
                        (plus.cov - minus.cov) * inv, std::nullopt};
    const double np = norm(plus.mean_field);
    const double nm = norm(minus.mean_field);
    if (np > kZeroFieldThreshold && nm > kZeroFieldThreshold) {
        d.u_prime = (plus.mean_field * Complex(1.0 / np, 0.0) - minus.mean_field * Complex(1.0 / nm, 0.0)) *
                    Complex(inv, 0.0);
    }
    return d;
}

}  // namespace

DerivativeBundle differentiate(const ParametricFamily &family, const GridPtr &grid,
                               const DifferentiateOptions &options) {
    const double h = options.step;
    if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    ModelState origin = family.evaluate(0.0, grid);
    CentralDifference d = central_difference(family, grid, h);
    if (options.richardson) {
        const CentralDifference half = central_difference(family, grid, 0.5 * h);
        const Complex four(4.0 / 3.0, 0.0);
        const Complex one(1.0 / 3.0, 0.0);
        d.a_prime = half.a_prime * four - d.a_prime * one;
        d.n_prime = (4.0 * half.n_prime - d.n_prime) / 3.0;
        d.cov_prime = (4.0 * half.cov_prime - d.cov_prime) / 3.0;
        if (d.u_prime && half.u_prime) d.u_prime = *half.u_prime * four - *d.u_prime * one;
    }
    const double n = norm_sq(origin.mean_field);
    if (!(n > kZeroFieldThreshold * kZeroFieldThreshold)) d.u_prime.reset();
    return DerivativeBundle{.a_bar = std::move(origin.mean_field),
                            .a_bar_prime = std::move(d.a_prime),
                            .n = n,
                            .n_prime = d.n_prime,
                            .cov0 = std::move(origin.cov),
                            .cov_prime = std::move(d.cov_prime),
                            .basis = std::move(origin.basis),
                            .u_prime = std::move(d.u_prime),
                            .step = h,
                            .analytic = false};
}

DerivativeBundle differentiate_analytic(const ParametricFamily &family, const GridPtr &grid) {
    auto analytic = family.analytic_derivative(grid);
    if (!analytic) raise(ErrorCode::InvalidArgument, "model " + family.id() + " has no analytic derivative");
    ModelState origin = family.evaluate(0.0, grid);
    const double n = norm_sq(origin.mean_field);
    return DerivativeBundle{.a_bar = std::move(origin.mean_field),
                            .a_bar_prime = std::move(analytic->a_bar_prime),
                            .n = n,
                            .n_prime = analytic->n_prime,
                            .cov0 = std::move(origin.cov),
                            .cov_prime = std::move(analytic->cov_prime),
                            .basis = std::move(origin.basis),
                            .u_prime = std::move(analytic->u_prime),
                            .step = 0.0,
                            .analytic = true};
}

// --- phase -----------------------------------------------------------------

PhaseFamily::PhaseFamily(double photons, double waist, double detection_variance)
    : photons_(photons), waist_(waist), variance_(detection_variance) {
    require_positive(photons_, "N");
    require_positive(waist_, "w");
    require_positive(variance_, "detection variance");
}

nlohmann::json PhaseFamily::params() const { return {{"N", photons_}, {"w", waist_}, {"sigma2", variance_}}; }

ModelState PhaseFamily::evaluate_at(double theta, const GridPtr &grid) const {
    ModeBasis basis = single_mode_basis(waist_, grid);
    ComplexField field = basis[0] * (std::sqrt(photons_) * std::polar(1.0, theta));
    // Detection mode i u0 is the p quadrature of u0.
    return {std::move(field), std::move(basis), single_mode_cov(1.0 / variance_)};
}

std::optional<AnalyticDerivative> PhaseFamily::analytic_derivative(const GridPtr &grid) const {
    const ComplexField u0 = hermite_gauss(0, waist_, 0.0, grid);
    return AnalyticDerivative{u0 * Complex(0.0, std::sqrt(photons_)), 0.0, RealMatrix::Zero(2, 2),
                              u0 * Complex(0.0, 1.0)};
}

// --- displacement ----------------------------------------------------------

DisplacementFamily::DisplacementFamily(double photons, double waist, double detection_variance, std::size_t modes)
    : photons_(photons), waist_(waist), variance_(detection_variance), modes_(modes) {
    require_positive(photons_, "N");
    require_positive(waist_, "w");
    require_positive(variance_, "detection variance");
    if (modes_ < 2) raise(ErrorCode::InvalidArgument, "displacement model needs at least 2 modes");
}

nlohmann::json DisplacementFamily::params() const {
    return {{"N", photons_}, {"w", waist_}, {"sigma2", variance_}, {"modes", modes_}};
}

ModelState DisplacementFamily::evaluate_at(double theta, const GridPtr &grid) const {
    ModeBasis basis = hermite_gauss_basis(modes_, waist_, 0.0, grid);
    ComplexField field = hermite_gauss(0, waist_, theta, grid) * Complex(std::sqrt(photons_), 0.0);
    const auto m = static_cast<Eigen::Index>(modes_);
    RealMatrix cov = RealMatrix::Identity(2 * m, 2 * m);
    cov(1, 1) = variance_;
    cov(m + 1, m + 1) = 1.0 / variance_;
    return {std::move(field), std::move(basis), std::move(cov)};
}

std::optional<AnalyticDerivative> DisplacementFamily::analytic_derivative(const GridPtr &grid) const {
    // d/dtheta HG0(x - theta) = (2 x / w^2) HG0(x) at theta = 0.
    const ComplexField u0 = hermite_gauss(0, waist_, 0.0, grid);
    ComplexVector values = u0.values();
    const auto &x = grid->points();
    for (Eigen::Index k = 0; k < x.size(); ++k) values(k) *= 2.0 * x(k) / (waist_ * waist_);
    ComplexField u_prime(grid, std::move(values));
    const auto m = static_cast<Eigen::Index>(modes_);
    return AnalyticDerivative{u_prime * Complex(std::sqrt(photons_), 0.0), 0.0, RealMatrix::Zero(2 * m, 2 * m),
                              u_prime};
}

// --- amplitude -------------------------------------------------------------

AmplitudeFamily::AmplitudeFamily(double photons, double modulation, double waist, double detection_variance)
    : photons_(photons), modulation_(modulation), waist_(waist), variance_(detection_variance) {
    require_positive(photons_, "N");
    require_positive(waist_, "w");
    require_positive(variance_, "detection variance");
    if (!std::isfinite(modulation_) || std::abs(modulation_) * kDefaultDomainBound >= 1.0) {
        raise(ErrorCode::InvalidArgument, "modulation depth must keep 1 + m theta positive on the domain");
    }
}

nlohmann::json AmplitudeFamily::params() const {
    return {{"N", photons_}, {"m", modulation_}, {"w", waist_}, {"sigma2", variance_}};
}

ModelState AmplitudeFamily::evaluate_at(double theta, const GridPtr &grid) const {
    ModeBasis basis = single_mode_basis(waist_, grid);
    ComplexField field = basis[0] * Complex(std::sqrt(photons_) * (1.0 + modulation_ * theta), 0.0);
    return {std::move(field), std::move(basis), single_mode_cov(variance_)};
}

std::optional<AnalyticDerivative> AmplitudeFamily::analytic_derivative(const GridPtr &grid) const {
    const ComplexField u0 = hermite_gauss(0, waist_, 0.0, grid);
    return AnalyticDerivative{u0 * Complex(std::sqrt(photons_) * modulation_, 0.0),
                              2.0 * photons_ * modulation_, RealMatrix::Zero(2, 2), ComplexField::zeros(grid)};
}

// --- squeeze-param ---------------------------------------------------------

nlohmann::json SqueezeParamFamily::params() const { return {{"w", waist_}}; }

ModelState SqueezeParamFamily::evaluate_at(double theta, const GridPtr &grid) const {
    return {ComplexField::zeros(grid), single_mode_basis(waist_, grid), single_mode_cov(std::exp(2.0 * theta))};
}

std::optional<AnalyticDerivative> SqueezeParamFamily::analytic_derivative(const GridPtr &grid) const {
    RealMatrix cov_prime = RealMatrix::Zero(2, 2);
    cov_prime(0, 0) = 2.0;
    cov_prime(1, 1) = -2.0;
    return AnalyticDerivative{ComplexField::zeros(grid), 0.0, std::move(cov_prime), std::nullopt};
}

// --- rotated-squeezed ------------------------------------------------------

RotatedSqueezedFamily::RotatedSqueezedFamily(double photons, double variance, double waist)
    : photons_(photons), variance_(variance), waist_(waist) {
    require_positive(photons_, "N");
    require_positive(variance_, "variance");
    require_positive(waist_, "w");
}

nlohmann::json RotatedSqueezedFamily::params() const {
    return {{"N", photons_}, {"sigma2", variance_}, {"w", waist_}};
}

ModelState RotatedSqueezedFamily::evaluate_at(double theta, const GridPtr &grid) const {
    ModeBasis basis = single_mode_basis(waist_, grid);
    ComplexField field = basis[0] * (std::sqrt(photons_) * std::polar(1.0, theta));
    const RealMatrix r = rotation(theta);
    RealMatrix cov = r * single_mode_cov(variance_) * r.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return {std::move(field), std::move(basis), std::move(cov)};
}

std::optional<AnalyticDerivative> RotatedSqueezedFamily::analytic_derivative(const GridPtr &grid) const {
    const ComplexField u0 = hermite_gauss(0, waist_, 0.0, grid);
    RealMatrix generator(2, 2);
    generator << 0.0, -1.0, 1.0, 0.0;
    const RealMatrix cov0 = single_mode_cov(variance_);
    return AnalyticDerivative{u0 * Complex(0.0, std::sqrt(photons_)), 0.0,
                              generator * cov0 + cov0 * generator.transpose(), u0 * Complex(0.0, 1.0)};
}

// --- vacuum ----------------------------------------------------------------

nlohmann::json VacuumFamily::params() const { return {{"w", waist_}}; }

ModelState VacuumFamily::evaluate_at(double, const GridPtr &grid) const {
    return {ComplexField::zeros(grid), single_mode_basis(waist_, grid), RealMatrix::Identity(2, 2)};
}

std::optional<AnalyticDerivative> VacuumFamily::analytic_derivative(const GridPtr &grid) const {
    return AnalyticDerivative{ComplexField::zeros(grid), 0.0, RealMatrix::Zero(2, 2), std::nullopt};
}

// --- symplectic path -------------------------------------------------------

SymplecticPathFamily::SymplecticPathFamily(std::size_t modes, RealVector mean0, RealVector mean1, RealVector mean2,
                                           RealMatrix s0, RealMatrix generator, double waist)
    : modes_(modes),
      mean0_(std::move(mean0)),
      mean1_(std::move(mean1)),
      mean2_(std::move(mean2)),
      s0_(std::move(s0)),
      generator_(std::move(generator)),
      waist_(waist) {
    const auto n = static_cast<Eigen::Index>(2 * modes_);
    if (modes_ == 0 || mean0_.size() != n || mean1_.size() != n || mean2_.size() != n || s0_.rows() != n ||
        s0_.cols() != n || generator_.rows() != n || generator_.cols() != n) {
        raise(ErrorCode::DimensionError, "symplectic path family dimensions are inconsistent");
    }
    SymplecticTransform check(s0_);
    if ((generator_ - generator_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
        raise(ErrorCode::InvalidArgument, "path generator must be symmetric");
    }
    require_positive(waist_, "w");
}

SymplecticPathFamily SymplecticPathFamily::random(std::size_t modes, std::uint64_t seed, double waist) {
    CounterRng rng(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const auto m = static_cast<Eigen::Index>(modes);
    const auto n = 2 * m;

    auto passive = [&]() { return symplectic_from_unitary(haar_unitary(modes, rng)).matrix(); };
    RealVector squeeze(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        // Up to 10 dB per mode.
        const double r = 0.5 * std::log(10.0) * uniform(rng);
        squeeze(i) = std::exp(-r);
        squeeze(m + i) = std::exp(r);
    }
    RealMatrix s0 = passive() * squeeze.asDiagonal() * passive();

    RealMatrix h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            h(i, j) = h(j, i) = 0.5 * normal(rng);
        }
    }
    RealVector m0(n), m1(n), m2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m0(i) = 4.0 * normal(rng);
        m1(i) = 2.0 * normal(rng);
        m2(i) = normal(rng);
    }
    return SymplecticPathFamily(modes, std::move(m0), std::move(m1), std::move(m2), std::move(s0), std::move(h),
                                waist);
}

nlohmann::json SymplecticPathFamily::params() const {
    auto vec = [](const RealVector &v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    auto mat = [&](const RealMatrix &a) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < a.rows(); ++r) rows.push_back(vec(a.row(r).transpose()));
        return rows;
    };
    return {{"modes", modes_}, {"mean0", vec(mean0_)}, {"mean1", vec(mean1_)}, {"mean2", vec(mean2_)},
            {"s0", mat(s0_)},  {"generator", mat(generator_)}, {"w", waist_}};
}

ModelState SymplecticPathFamily::evaluate_at(double theta, const GridPtr &grid) const {
    ModeBasis basis = hermite_gauss_basis(modes_, waist_, 0.0, grid);
    const RealMatrix omega = symplectic_form(modes_);
    const RealMatrix s = s0_ * (theta * omega * generator_).exp();
    RealMatrix cov = s * s.transpose();
    cov = 0.5 * (cov + cov.transpose());
    const RealVector mean = mean0_ + theta * mean1_ + theta * theta * mean2_;
    ComplexField field = field_from_quadratures(mean, basis);
    return {std::move(field), std::move(basis), std::move(cov)};
}

std::optional<AnalyticDerivative> SymplecticPathFamily::analytic_derivative(const GridPtr &grid) const {
    const ModeBasis basis = hermite_gauss_basis(modes_, waist_, 0.0, grid);
    const RealMatrix omega = symplectic_form(modes_);
    const RealMatrix k = omega * generator_;
    const RealMatrix s_prime = s0_ * k;
    RealMatrix cov_prime = s_prime * s0_.transpose() + s0_ * s_prime.transpose();
    cov_prime = 0.5 * (cov_prime + cov_prime.transpose());
    ComplexField a = field_from_quadratures(mean0_, basis);
    ComplexField a_prime = field_from_quadratures(mean1_, basis);
    const double n = norm_sq(a);
    const double n_prime = 2.0 * inner_product(a, a_prime).real();
    std::optional<ComplexField> u_prime;
    if (n > 0.0) {
        const double rn = std::sqrt(n);
        u_prime = a_prime * Complex(1.0 / rn, 0.0) - a * Complex(n_prime / (2.0 * n * rn), 0.0);
    }
    return AnalyticDerivative{std::move(a_prime), n_prime, std::move(cov_prime), std::move(u_prime)};
}

// --- configuration ---------------------------------------------------------

void reject_unknown_keys(const nlohmann::json &obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
    if (!obj.is_object()) raise(ErrorCode::ConfigError, std::string(context) + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (auto key : allowed) known = known || it.key() == key;
        if (!known) raise(ErrorCode::ConfigError, "unknown key '" + it.key() + "' in " + std::string(context));
    }
}

namespace {

double number_or(const nlohmann::json &obj, const char *key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto &v = obj.at(key);
    if (!v.is_number()) raise(ErrorCode::ConfigError, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

double require_number(const nlohmann::json &obj, const char *key, std::string_view model) {
    if (!obj.contains(key)) {
        raise(ErrorCode::ConfigError, "model " + std::string(model) + " requires parameter '" + key + "'");
    }
    return number_or(obj, key, 0.0);
}

// squeeze_db and sigma2 are alternative spellings of the same quantity.
double detection_variance(const nlohmann::json &params) {
    if (params.contains("squeeze_db") && params.contains("sigma2")) {
        raise(ErrorCode::ConfigError, "give either 'squeeze_db' or 'sigma2', not both");
    }
    if (params.contains("sigma2")) return number_or(params, "sigma2", 1.0);
    return db_to_variance(number_or(params, "squeeze_db", 0.0));
}

}  // namespace

ModelConfig parse_model_config(const nlohmann::json &j) {
    if (!j.is_object()) raise(ErrorCode::ConfigError, "model config must be a JSON object");
    ModelConfig config;
    if (!j.contains("model") || !j.at("model").is_string()) {
        raise(ErrorCode::ConfigError, "model config needs a string 'model'");
    }
    config.model = j.at("model").get<std::string>();
    if (j.contains("params")) {
        config.params = j.at("params");
        if (!config.params.is_object()) raise(ErrorCode::ConfigError, "'params' must be an object");
    }
    if (j.contains("grid")) {
        const auto &g = j.at("grid");
        reject_unknown_keys(g, {"min", "max", "points"}, "grid");
        GridConfig grid;
        grid.min = number_or(g, "min", grid.min);
        grid.max = number_or(g, "max", grid.max);
        const double points = number_or(g, "points", static_cast<double>(grid.points));
        if (!(points >= 2.0) || points != std::floor(points)) {
            raise(ErrorCode::ConfigError, "grid.points must be an integer >= 2");
        }
        grid.points = static_cast<std::size_t>(points);
        if (!(grid.max > grid.min)) raise(ErrorCode::ConfigError, "grid.max must exceed grid.min");
        config.grid = grid;
    }
    // Validate parameter names eagerly so the error names the offending key.
    (void)make_family(config);
    return config;
}

nlohmann::json to_json(const ModelConfig &config) {
    nlohmann::json j{{"model", config.model}, {"params", config.params}};
    if (config.grid) j["grid"] = {{"min", config.grid->min}, {"max", config.grid->max}, {"points", config.grid->points}};
    return j;
}

FamilyPtr make_family(const ModelConfig &config) {
    const auto &p = config.params;
    const std::string &model = config.model;
    try {
        if (model == "phase") {
            reject_unknown_keys(p, {"N", "w", "squeeze_db", "sigma2"}, "params of model phase");
            return std::make_shared<PhaseFamily>(require_number(p, "N", model), number_or(p, "w", 1.0),
                                                 detection_variance(p));
        }
        if (model == "displacement") {
            reject_unknown_keys(p, {"N", "w", "squeeze_db", "sigma2", "modes"}, "params of model displacement");
            const double modes = number_or(p, "modes", 6.0);
            if (!(modes >= 2.0) || modes != std::floor(modes) || modes > 64.0) {
                raise(ErrorCode::ConfigError, "'modes' must be an integer in [2, 64]");
            }
            return std::make_shared<DisplacementFamily>(require_number(p, "N", model), number_or(p, "w", 1.0),
                                                        detection_variance(p), static_cast<std::size_t>(modes));
        }
        if (model == "amplitude") {
            reject_unknown_keys(p, {"N", "m", "w", "squeeze_db", "sigma2"}, "params of model amplitude");
            return std::make_shared<AmplitudeFamily>(require_number(p, "N", model), number_or(p, "m", 1.0),
                                                     number_or(p, "w", 1.0), detection_variance(p));
        }
        if (model == "squeeze-param") {
            reject_unknown_keys(p, {"w"}, "params of model squeeze-param");
            return std::make_shared<SqueezeParamFamily>(number_or(p, "w", 1.0));
        }
        if (model == "rotated-squeezed") {
            reject_unknown_keys(p, {"N", "w", "squeeze_db", "sigma2"}, "params of model rotated-squeezed");
            return std::make_shared<RotatedSqueezedFamily>(require_number(p, "N", model), detection_variance(p),
                                                           number_or(p, "w", 1.0));
        }
        if (model == "vacuum") {
            reject_unknown_keys(p, {"w"}, "params of model vacuum");
            return std::make_shared<VacuumFamily>(number_or(p, "w", 1.0));
        }
    } catch (const Error &e) {
        if (e.code() == ErrorCode::InvalidArgument) raise(ErrorCode::ConfigError, e.what());
        throw;
    }
    raise(ErrorCode::ConfigError, "unknown model '" + model + "'");
}

GridPtr make_grid(const ModelConfig &config, const ParametricFamily &family) {
    if (config.grid) return Grid::uniform(config.grid->min, config.grid->max, config.grid->points);
    const double w = family.length_scale();
    return Grid::uniform(-8.0 * w, 8.0 * w, 1024);
}

}  // namespace gqcr
