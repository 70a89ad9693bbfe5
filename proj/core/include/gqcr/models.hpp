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

// Theta-parametrized pure Gaussian families: a mean field on a grid plus a
// covariance matrix declared in the family's own fixed mode basis.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "gqcr/gaussian.hpp"
#include "gqcr/modes.hpp"
#include "json.hpp"

namespace gqcr {

inline constexpr double kDefaultDomainBound = 0.3;
inline constexpr double kDefaultStep = 1e-4;

struct ModelState {
    ComplexField mean_field;
    ModeBasis basis;
    RealMatrix cov;

    /// Mean quadratures of mean_field projected on basis, together with cov.
    GaussianState gaussian() const;
};

struct AnalyticDerivative {
    ComplexField a_bar_prime;
    double n_prime = 0.0;
    RealMatrix cov_prime;
    std::optional<ComplexField> u_prime;
};

/// Everything the sensitivity formulas need at theta = 0.
struct DerivativeBundle {
    ComplexField a_bar;
    ComplexField a_bar_prime;
    double n = 0.0;
    double n_prime = 0.0;
    RealMatrix cov0;
    RealMatrix cov_prime;
    ModeBasis basis;
    /// Derivative of the normalized mean-field mode; empty when N = 0.
    std::optional<ComplexField> u_prime;
    /// Finite-difference step, 0 for analytic bundles.
    double step = 0.0;
    bool analytic = false;

    RealVector mean_prime() const { return mean_quadratures(a_bar_prime, basis); }
    RealVector mean0() const { return mean_quadratures(a_bar, basis); }
};

class ParametricFamily {
   public:
    virtual ~ParametricFamily() = default;

    virtual std::string id() const = 0;
    virtual nlohmann::json params() const = 0;
    /// Admissible theta lie in [-bound, bound].
    virtual double domain_bound() const { return kDefaultDomainBound; }
    /// Characteristic transverse scale; used to seed Hermite-Gauss ladders.
    virtual double length_scale() const { return 1.0; }
    virtual std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const;

    /// Throws DomainError outside the declared domain.
    ModelState evaluate(double theta, const GridPtr &grid) const;

   protected:
    virtual ModelState evaluate_at(double theta, const GridPtr &grid) const = 0;
};

using FamilyPtr = std::shared_ptr<const ParametricFamily>;

struct DifferentiateOptions {
    double step = kDefaultStep;
    bool richardson = false;
};

/// Central differences at theta = 0, optionally Richardson-extrapolated over
/// steps h and h/2.
DerivativeBundle differentiate(const ParametricFamily &family, const GridPtr &grid,
                               const DifferentiateOptions &options = {});

/// Uses the family's closed-form derivative; throws InvalidArgument when the
/// family has none.
DerivativeBundle differentiate_analytic(const ParametricFamily &family, const GridPtr &grid);

// ---------------------------------------------------------------------------
// Built-in families.

/// a = sqrt(N) e^{i theta} u0; the detection mode i u0 may carry squeezing.
class PhaseFamily final : public ParametricFamily {
   public:
    PhaseFamily(double photons, double waist = 1.0, double detection_variance = 1.0);
    std::string id() const override { return "phase"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double photons_, waist_, variance_;
};

/// a = sqrt(N) HG0(x - theta); theta is a lateral shift in grid units, the
/// detection mode is HG1. Modeled in the ladder HG0..HG(modes-1).
class DisplacementFamily final : public ParametricFamily {
   public:
    DisplacementFamily(double photons, double waist = 1.0, double detection_variance = 1.0,
                       std::size_t modes = 6);
    std::string id() const override { return "displacement"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double photons_, waist_, variance_;
    std::size_t modes_;
};

/// a = sqrt(N)(1 + m theta) u0.
class AmplitudeFamily final : public ParametricFamily {
   public:
    AmplitudeFamily(double photons, double modulation, double waist = 1.0, double detection_variance = 1.0);
    std::string id() const override { return "amplitude"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double photons_, modulation_, waist_, variance_;
};

/// Squeezed vacuum with Gamma = diag(e^{2 theta}, e^{-2 theta}).
class SqueezeParamFamily final : public ParametricFamily {
   public:
    explicit SqueezeParamFamily(double waist = 1.0) : waist_(waist) {}
    std::string id() const override { return "squeeze-param"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double waist_;
};

/// Phase-rotated displaced squeezed state: mean sqrt(N) e^{i theta} u0 and
/// Gamma = R(theta) diag(s, 1/s) R(theta)^T.
class RotatedSqueezedFamily final : public ParametricFamily {
   public:
    RotatedSqueezedFamily(double photons, double variance, double waist = 1.0);
    std::string id() const override { return "rotated-squeezed"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double photons_, variance_, waist_;
};

/// Theta-independent vacuum; carries no information.
class VacuumFamily final : public ParametricFamily {
   public:
    explicit VacuumFamily(double waist = 1.0) : waist_(waist) {}
    std::string id() const override { return "vacuum"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    double waist_;
};

/// General M-mode pure family in the Hermite-Gauss ladder:
///   mean(theta) = m0 + theta m1 + theta^2 m2,
///   Gamma(theta) = S(theta) S(theta)^T, S(theta) = S0 exp(theta Omega H)
/// with S0 symplectic and H symmetric.
class SymplecticPathFamily final : public ParametricFamily {
   public:
    SymplecticPathFamily(std::size_t modes, RealVector mean0, RealVector mean1, RealVector mean2, RealMatrix s0,
                         RealMatrix generator, double waist = 1.0);

    /// Random instance with moderate squeezing and displacement.
    static SymplecticPathFamily random(std::size_t modes, std::uint64_t seed, double waist = 1.0);

    std::string id() const override { return "symplectic-path"; }
    nlohmann::json params() const override;
    double length_scale() const override { return waist_; }
    std::optional<AnalyticDerivative> analytic_derivative(const GridPtr &grid) const override;

    std::size_t modes() const noexcept { return modes_; }

   protected:
    ModelState evaluate_at(double theta, const GridPtr &grid) const override;

   private:
    std::size_t modes_;
    RealVector mean0_, mean1_, mean2_;
    RealMatrix s0_, generator_;
    double waist_;
};

// ---------------------------------------------------------------------------
// Model configuration: {"model": ..., "params": {...}, "grid": {...}}.

struct GridConfig {
    double min = -8.0;
    double max = 8.0;
    std::size_t points = 1024;
};

struct ModelConfig {
    std::string model;
    nlohmann::json params = nlohmann::json::object();
    std::optional<GridConfig> grid;
};

/// Strict: unknown keys raise ConfigError naming the key.
ModelConfig parse_model_config(const nlohmann::json &j);
nlohmann::json to_json(const ModelConfig &config);

FamilyPtr make_family(const ModelConfig &config);
/// Default grid spans [-8w, 8w] with 1024 points.
GridPtr make_grid(const ModelConfig &config, const ParametricFamily &family);

/// Throws ConfigError naming the first key of obj not in allowed.
void reject_unknown_keys(const nlohmann::json &obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

}  // namespace gqcr
