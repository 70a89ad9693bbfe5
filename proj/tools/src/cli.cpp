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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gqcr/allocation.hpp"
#include "gqcr/fisher.hpp"
#include "gqcr/homodyne.hpp"
#include "gqcr/json_io.hpp"
#include "gqcr/models.hpp"
#include "gqcr/oracle.hpp"
#include "gqcr/random.hpp"
#include "svg.hpp"

namespace gqcr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kOracleTolerance = 1e-4;
constexpr double kGridTolerance = 1e-6;

// Separate stream ranges so the grid-overlap pairs never reuse a family seed.
constexpr std::uint64_t kGridPairStream = 1ULL << 32;

// --- config helpers ---------------------------------------------------------

void require_version(const json &cfg) {
    if (!cfg.contains("version")) raise(ErrorCode::ConfigError, "config needs \"version\": " + std::to_string(kConfigVersion));
    const json &v = cfg.at("version");
    if (!v.is_number_integer() || v.get<int>() != kConfigVersion) {
        raise(ErrorCode::ConfigError, "unsupported config version " + v.dump() + " (expected " +
                                          std::to_string(kConfigVersion) + ")");
    }
}

double number(const json &obj, const char *key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json &v = obj.at(key);
    if (!v.is_number()) raise(ErrorCode::ConfigError, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

std::int64_t integer(const json &obj, const char *key, std::int64_t fallback, std::int64_t min) {
    if (!obj.contains(key)) return fallback;
    const json &v = obj.at(key);
    if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == std::floor(v.get<double>()))) {
        raise(ErrorCode::ConfigError, std::string("'") + key + "' must be an integer");
    }
    const auto value = static_cast<std::int64_t>(v.get<double>());
    if (value < min) raise(ErrorCode::ConfigError, std::string("'") + key + "' must be at least " + std::to_string(min));
    return value;
}

bool boolean(const json &obj, const char *key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) raise(ErrorCode::ConfigError, std::string("'") + key + "' must be true or false");
    return obj.at(key).get<bool>();
}

std::uint64_t seed_of(const json &cfg, const Invocation &inv, std::uint64_t fallback) {
    if (inv.seed) return *inv.seed;
    if (!cfg.contains("seed")) return fallback;
    const json &v = cfg.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        raise(ErrorCode::ConfigError, "'seed' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const json &obj, const char *key) {
    if (!obj.contains(key) || !obj.at(key).is_array() || obj.at(key).empty()) {
        raise(ErrorCode::ConfigError, std::string("'") + key + "' must be a non-empty array of numbers");
    }
    std::vector<double> out;
    for (const json &v : obj.at(key)) {
        if (!v.is_number()) raise(ErrorCode::ConfigError, std::string("'") + key + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// A swept parameter may be left out of params; its first value stands in
// so validation of the base model still runs.
ModelConfig model_config(const json &cfg, const std::string &swept = "", double first = 0.0) {
    json m = json::object();
    for (const char *key : {"model", "params", "grid"}) {
        if (cfg.contains(key)) m[key] = cfg.at(key);
    }
    if (!swept.empty()) {
        if (!m.contains("params")) m["params"] = json::object();
        if (m["params"].is_object() && !m["params"].contains(swept)) m["params"][swept] = first;
    }
    return parse_model_config(m);
}

AnalysisOptions analysis_options(const json &cfg) {
    AnalysisOptions o;
    if (cfg.contains("derivatives")) {
        const json &d = cfg.at("derivatives");
        if (d == "numeric") {
            o.derivatives = DerivativeMode::Numeric;
        } else if (d == "analytic") {
            o.derivatives = DerivativeMode::Analytic;
        } else {
            raise(ErrorCode::ConfigError, "'derivatives' must be \"numeric\" or \"analytic\"");
        }
    }
    o.differentiate.step = number(cfg, "step", kDefaultStep);
    if (!(o.differentiate.step > 0.0)) raise(ErrorCode::ConfigError, "'step' must be positive");
    o.differentiate.richardson = boolean(cfg, "richardson", false);
    o.q = integer(cfg, "q", 1, 1);
    return o;
}

std::string params_label(const json &params) {
    std::string out;
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (!out.empty()) out += ';';
        out += it.key() + '=';
        out += it.value().is_number() ? format_double(it.value().get<double>()) : it.value().dump();
    }
    return out;
}

json matrix_json(const RealMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        // + 0.0 folds -0 into 0 so identical networks serialize identically
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c) + 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_json(const fs::path &path, const json &j) { write_text_file(path, dump_json(j)); }

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// --- bound ------------------------------------------------------------------

std::string bound_table(const ModelConfig &model, const FisherReport &r) {
    std::ostringstream t;
    auto row = [&](const std::string &name, const std::string &value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-30s", name.c_str());
        t << buf << value << '\n';
    };
    row("model", model.model);
    row("params", params_label(model.params));
    row("Q", std::to_string(r.q));
    row("I_fisher", fixed(r.i_full));
    row("  mean term", fixed(r.i_mean_term));
    row("  covariance term", fixed(r.i_cov_term));
    row("  covariance share", fixed(r.cov_term_ratio));
    row("I_linearized", r.linearized_available ? fixed(r.i_reduced) : "n/a");
    row("I_0 (coherent)", r.i_zero > 0.0 ? fixed(r.i_zero) : "n/a");
    row("factor QN", fixed(static_cast<double>(r.q) * r.n));
    row("factor 4|u'|^2", fixed(r.mode_shape_term));
    row("factor (N'/N)^2", fixed(r.photon_number_term));
    row("factor Gamma^-1[1,1]", std::isfinite(r.gamma_inv_11) ? fixed(r.gamma_inv_11) : "n/a");
    row("delta_theta_min", fixed(r.delta_theta_min));
    row("delta_theta_linearized", r.linearized_available ? fixed(r.delta_theta_linearized) : "n/a");
    return t.str();
}

int cmd_bound(const Invocation &inv, const json &cfg, std::ostream &out) {
    reject_unknown_keys(cfg, {"version", "model", "params", "grid", "q", "derivatives", "step", "richardson"}, "config");
    const ModelConfig model = model_config(cfg);
    const AnalysisOptions opts = analysis_options(cfg);
    const FamilyPtr family = make_family(model);
    const GridPtr grid = make_grid(model, *family);
    const Analysis a = analyze(*family, grid, opts);

    write_json(inv.out / "bound.json", {{"model", to_json(model)}, {"report", to_json(a.report)}});
    const std::string table = bound_table(model, a.report);
    write_text_file(inv.out / "bound.txt", table);
    out << table;
    return kExitSuccess;
}

// --- oracle-check -----------------------------------------------------------

struct NamedFamily {
    std::string id;
    FamilyPtr family;
};

std::vector<NamedFamily> builtin_families() {
    return {
        {"phase", std::make_shared<PhaseFamily>(100.0)},
        {"phase-6db", std::make_shared<PhaseFamily>(100.0, 1.0, db_to_variance(6.0))},
        {"displacement", std::make_shared<DisplacementFamily>(1e6)},
        {"displacement-6db", std::make_shared<DisplacementFamily>(1e6, 1.0, db_to_variance(6.0))},
        {"amplitude", std::make_shared<AmplitudeFamily>(100.0, 1.0)},
        {"squeeze-param", std::make_shared<SqueezeParamFamily>()},
        {"rotated-squeezed", std::make_shared<RotatedSqueezedFamily>(100.0, 0.25)},
        {"vacuum", std::make_shared<VacuumFamily>()},
    };
}

int cmd_oracle_check(const Invocation &inv, const json &cfg, std::ostream &out, std::ostream &err) {
    reject_unknown_keys(cfg,
                        {"version", "model", "params", "grid", "builtins", "random_families", "max_modes",
                         "grid_pairs", "seed"},
                        "config");
    const std::uint64_t seed = seed_of(cfg, inv, 1);
    const bool has_model = cfg.contains("model");
    const bool builtins = boolean(cfg, "builtins", !has_model);
    const auto random_families = integer(cfg, "random_families", has_model ? 0 : 50, 0);
    const auto max_modes = integer(cfg, "max_modes", 3, 1);
    const auto grid_pairs = integer(cfg, "grid_pairs", 200, 0);

    std::vector<OracleCase> cases;
    if (has_model) {
        const ModelConfig model = model_config(cfg);
        const FamilyPtr family = make_family(model);
        cases.push_back(compare_routes(model.model, *family, make_grid(model, *family)));
    }
    if (builtins) {
        for (const auto &[id, family] : builtin_families()) {
            cases.push_back(compare_routes(id, *family, Grid::uniform(-8.0, 8.0, 1024)));
        }
    }
    for (std::int64_t i = 0; i < random_families; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const auto modes = static_cast<std::size_t>(1 + i % max_modes);
        const auto family = SymplecticPathFamily::random(modes, rng());
        cases.push_back(compare_routes("random-" + std::to_string(i) + "-m" + std::to_string(modes), family,
                                       Grid::uniform(-8.0, 8.0, 1024)));
    }

    std::ostringstream csv;
    csv << oracle_csv_header() << '\n';
    const OracleCase *worst = nullptr;
    std::int64_t skipped = 0;
    for (const OracleCase &c : cases) {
        csv << oracle_csv_row(c) << '\n';
        if (c.skipped) {
            ++skipped;
        } else if (!worst || c.rel_err > worst->rel_err) {
            worst = &c;
        }
    }
    write_text_file(inv.out / "oracle.csv", csv.str());

    std::ostringstream grid_csv;
    grid_csv << "pair,closed_form,grid,abs_err\n";
    double worst_grid = 0.0;
    for (std::int64_t k = 0; k < grid_pairs; ++k) {
        CounterRng rng(seed, kGridPairStream + static_cast<std::uint64_t>(k));
        const GaussianState a = random_pure_state(1, rng);
        const GaussianState b = random_pure_state(1, rng);
        const GridPlan plan = plan_overlap_grid(a, b);
        const double closed = overlap_closed_form(a, b).overlap_sq;
        const double grid = overlap_grid(a, b, plan.box, plan.points_per_axis).overlap_sq;
        worst_grid = std::max(worst_grid, std::abs(grid - closed));
        grid_csv << k << ',' << format_double(closed) << ',' << format_double(grid) << ','
                 << format_double(std::abs(grid - closed)) << '\n';
    }
    if (grid_pairs > 0) write_text_file(inv.out / "overlap_grid.csv", grid_csv.str());

    const double worst_rel = worst ? worst->rel_err : 0.0;
    const bool passed = worst_rel < kOracleTolerance && worst_grid < kGridTolerance;
    write_json(inv.out / "oracle_summary.json",
               {{"seed", seed},
                {"cases", cases.size()},
                {"skipped", skipped},
                {"worst_case", worst ? worst->case_id : ""},
                {"worst_rel_err", worst_rel},
                {"rel_err_tolerance", kOracleTolerance},
                {"grid_pairs", grid_pairs},
                {"worst_grid_abs_err", worst_grid},
                {"grid_tolerance", kGridTolerance},
                {"passed", passed}});

    out << "oracle cases: " << cases.size() << " (" << skipped << " skipped), worst rel_err "
        << format_double(worst_rel) << (worst ? " [" + worst->case_id + "]" : "") << '\n';
    if (grid_pairs > 0) out << "grid overlap pairs: " << grid_pairs << ", worst abs err " << format_double(worst_grid) << '\n';
    if (!passed) {
        err << "gqcr: oracle check failed: worst rel_err " << format_double(worst_rel)
            << (worst ? " in case " + worst->case_id : "") << ", worst grid error " << format_double(worst_grid)
            << '\n';
        return kExitVerification;
    }
    return kExitSuccess;
}

// --- simulate ---------------------------------------------------------------

struct LoSettings {
    LoModeSpec mode;
    double phase = 0.0;
    double photons = kDefaultLoPhotons;
};

LoSettings lo_settings(const json &cfg) {
    LoSettings lo;
    if (!cfg.contains("lo")) return lo;
    const json &j = cfg.at("lo");
    reject_unknown_keys(j, {"mode", "phase", "photons"}, "lo");
    if (j.contains("mode")) lo.mode = LoModeSpec::from_json(j.at("mode"));
    lo.phase = number(j, "phase", 0.0);
    lo.photons = number(j, "photons", kDefaultLoPhotons);
    if (!(lo.photons > 0.0)) raise(ErrorCode::ConfigError, "lo.photons must be positive");
    return lo;
}

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

std::optional<SweepSpec> sweep_spec(const json &cfg) {
    if (!cfg.contains("sweep")) return std::nullopt;
    const json &j = cfg.at("sweep");
    reject_unknown_keys(j, {"parameter", "values"}, "sweep");
    if (!j.contains("parameter") || !j.at("parameter").is_string()) {
        raise(ErrorCode::ConfigError, "sweep.parameter must be a string");
    }
    return SweepSpec{j.at("parameter").get<std::string>(), number_list(j, "values")};
}

ExperimentReport simulate_once(const ModelConfig &model, double theta, const LoSettings &lo, std::int64_t samples,
                               std::int64_t repetitions, std::uint64_t seed, unsigned threads,
                               const AnalysisOptions &opts) {
    const FamilyPtr family = make_family(model);
    const GridPtr grid = make_grid(model, *family);
    const Analysis analysis = analyze(*family, grid, opts);
    HomodyneConfig hc{.lo_mode = resolve_lo_mode(lo.mode, *family, grid, analysis),
                      .lo_photons = lo.photons,
                      .lo_phase = lo.phase,
                      .samples = samples,
                      .seed = seed};
    return run_experiment(*family, grid, analysis, theta, hc,
                          {.repetitions = repetitions, .threads = threads, .analysis = opts});
}

int cmd_simulate(const Invocation &inv, const json &cfg, std::ostream &out) {
    reject_unknown_keys(cfg,
                        {"version", "model", "params", "grid", "lo", "theta", "samples", "repetitions", "seed",
                         "derivatives", "step", "richardson", "sweep"},
                        "config");
    const auto sweep = sweep_spec(cfg);
    const bool sweep_n = sweep && sweep->parameter == "N";
    const ModelConfig model = sweep_n ? model_config(cfg, "N", sweep->values.front()) : model_config(cfg);
    const AnalysisOptions opts = analysis_options(cfg);
    const LoSettings lo = lo_settings(cfg);
    const double theta = number(cfg, "theta", 0.0);
    const auto samples = integer(cfg, "samples", 1, 1);
    const auto repetitions = integer(cfg, "repetitions", 1000, 2);
    const std::uint64_t seed = seed_of(cfg, inv, 42);
    const unsigned threads = resolve_threads(inv.threads);
    const json lo_json{{"mode", lo.mode.to_json()}, {"phase", lo.phase}, {"photons", lo.photons}};

    if (!sweep) {
        const ExperimentReport r = simulate_once(model, theta, lo, samples, repetitions, seed, threads, opts);
        write_text_file(inv.out / "repetitions.csv", repetition_csv(r));
        write_json(inv.out / "summary.json",
                   {{"model", to_json(model)}, {"lo", lo_json}, {"seed", seed}, {"report", to_json(r)}});
        out << "theta_true " << format_double(theta) << ", mean estimate " << format_double(r.estimates.mean)
            << " +- " << format_double(r.estimates.std_error) << '\n';
        if (r.divergent) {
            out << "LO mode is insensitive to theta: delta_theta diverges\n";
        } else {
            out << "empirical delta_theta " << format_double(r.empirical_delta_theta) << ", QCR "
                << format_double(r.qcr_delta_theta) << ", ratio " << format_double(r.ratio) << '\n';
        }
        return r.cramer_rao_respected ? kExitSuccess : kExitVerification;
    }

    if (sweep->parameter != "N" && sweep->parameter != "theta") {
        raise(ErrorCode::ConfigError, "simulate sweeps support parameter \"N\" or \"theta\"");
    }
    std::ostringstream csv;
    csv << "value,empirical_delta_theta,qcr_delta_theta,ratio,bias,divergent\n";
    json points = json::array();
    std::vector<double> xs, empirical, qcr;
    bool respected = true;
    for (double v : sweep->values) {
        ModelConfig point = model;
        double t = theta;
        if (sweep->parameter == "N") {
            point.params["N"] = v;
        } else {
            t = v;
        }
        const ExperimentReport r = simulate_once(point, t, lo, samples, repetitions, seed, threads, opts);
        respected = respected && r.cramer_rao_respected;
        csv << format_double(v) << ',' << format_double(r.empirical_delta_theta) << ','
            << format_double(r.qcr_delta_theta) << ',' << format_double(r.ratio) << ',' << format_double(r.bias)
            << ',' << (r.divergent ? "true" : "false") << '\n';
        points.push_back({{"value", v}, {"report", to_json(r)}});
        xs.push_back(v);
        empirical.push_back(r.empirical_delta_theta);
        qcr.push_back(r.qcr_delta_theta);
    }
    const bool log_x = sweep->parameter == "N";
    json summary{{"model", to_json(model)}, {"lo", lo_json},   {"seed", seed},
                 {"sweep", {{"parameter", sweep->parameter}, {"values", sweep->values}}},
                 {"points", points}};
    if (log_x) {
        summary["log_log_slope_empirical"] = log_log_slope(xs, empirical);
        summary["log_log_slope_qcr"] = log_log_slope(xs, qcr);
    }
    write_text_file(inv.out / "sweep.csv", csv.str());
    write_json(inv.out / "summary.json", summary);
    write_text_file(inv.out / "sweep.svg",
                    render_svg({"homodyne delta_theta vs " + sweep->parameter, sweep->parameter,
                                "single-sample delta_theta", log_x, true},
                               {{"QCR bound", xs, qcr, false}, {"homodyne (empirical)", xs, empirical, true}}));
    out << "sweep over " << sweep->parameter << ": " << xs.size() << " points";
    if (log_x) out << ", log-log slope " << format_double(summary["log_log_slope_empirical"].get<double>());
    out << '\n';
    return respected ? kExitSuccess : kExitVerification;
}

// --- allocate ---------------------------------------------------------------

int cmd_allocate(const Invocation &inv, const json &cfg, std::ostream &out) {
    reject_unknown_keys(cfg, {"version", "bank_db", "bank_sigma2", "trials", "seed", "detection_index"}, "config");
    if (cfg.contains("bank_db") == cfg.contains("bank_sigma2")) {
        raise(ErrorCode::ConfigError, "give exactly one of 'bank_db' or 'bank_sigma2'");
    }
    SqueezerBank bank = cfg.contains("bank_db") ? SqueezerBank::from_db(number_list(cfg, "bank_db"))
                                                : SqueezerBank{number_list(cfg, "bank_sigma2")};
    const auto trials = integer(cfg, "trials", 1000, 1);
    const auto detection = static_cast<std::size_t>(integer(cfg, "detection_index", 0, 0));
    const std::uint64_t seed = seed_of(cfg, inv, 7);
    try {
        make_squeezed_bank(bank);
    } catch (const Error &e) {
        raise(ErrorCode::ConfigError, e.what());
    }
    if (detection >= bank.size()) raise(ErrorCode::ConfigError, "'detection_index' outside the bank");

    const auto [network, optimal] = optimize_allocation(bank, detection);
    const AuditReport audit = random_network_audit(bank, trials, seed, detection, resolve_threads(inv.threads));
    write_json(inv.out / "allocation.json", {{"bank_sigma2", bank.variances},
                                             {"detection_index", detection},
                                             {"optimal", {{"network", matrix_json(network.matrix())},
                                                          {"report", to_json(optimal)}}},
                                             {"audit", to_json(audit)}});
    write_text_file(inv.out / "audit.csv", audit_csv(audit));
    out << "optimal gamma_inv_11 " << format_double(optimal.gamma_inv_11) << " (bound "
        << format_double(optimal.spectral_radius) << ")\n";
    out << "audit: " << trials << " networks, max gamma_inv_11 " << format_double(audit.max_gamma_inv_11)
        << ", violations " << audit.bound_violations << ", " << (audit.passed ? "passed" : "FAILED") << '\n';
    return audit.passed ? kExitSuccess : kExitVerification;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const Invocation &inv, const json &cfg, std::ostream &out) {
    reject_unknown_keys(cfg, {"version", "model", "params", "grid", "q", "derivatives", "step", "richardson", "sweep"},
                        "config");
    const auto sweep = sweep_spec(cfg);
    if (!sweep) raise(ErrorCode::ConfigError, "sweep command needs a 'sweep' section");
    const ModelConfig model = model_config(cfg, sweep->parameter, sweep->values.front());
    const AnalysisOptions opts = analysis_options(cfg);
    if (sweep->parameter == "squeeze_db" && model.params.contains("sigma2")) {
        raise(ErrorCode::ConfigError, "cannot sweep squeeze_db when params fixes sigma2");
    }
    if (sweep->parameter == "sigma2" && model.params.contains("squeeze_db")) {
        raise(ErrorCode::ConfigError, "cannot sweep sigma2 when params fixes squeeze_db");
    }

    std::ostringstream csv;
    csv << fisher_csv_header() << '\n';
    std::vector<double> xs, full, linearized;
    for (double v : sweep->values) {
        ModelConfig point = model;
        point.params[sweep->parameter] = v;
        point = parse_model_config(to_json(point));
        const FamilyPtr family = make_family(point);
        const Analysis a = analyze(*family, make_grid(point, *family), opts);
        csv << fisher_csv_row(point.model + ',' + params_label(point.params), a.report) << '\n';
        xs.push_back(v);
        full.push_back(a.report.delta_theta_min);
        linearized.push_back(a.report.delta_theta_linearized);
    }
    const bool log_x = sweep->parameter == "N";
    write_text_file(inv.out / "sweep.csv", csv.str());
    write_text_file(inv.out / "sweep.svg",
                    render_svg({"QCR bound vs " + sweep->parameter, sweep->parameter, "delta_theta_min", log_x, true},
                               {{"full", xs, full, true}, {"linearized", xs, linearized, false}}));
    json summary{{"model", to_json(model)}, {"sweep", {{"parameter", sweep->parameter}, {"values", sweep->values}}}};
    if (log_x) summary["log_log_slope"] = log_log_slope(xs, full);
    write_json(inv.out / "sweep.json", summary);
    out << "sweep over " << sweep->parameter << ": " << xs.size() << " points written to "
        << (inv.out / "sweep.csv").string() << '\n';
    return kExitSuccess;
}

// --- modes ------------------------------------------------------------------

int cmd_modes(const Invocation &inv, const json &cfg, std::ostream &out) {
    reject_unknown_keys(cfg, {"version", "model", "params", "grid", "theta", "derivatives", "step", "richardson"},
                        "config");
    const ModelConfig model = model_config(cfg);
    const AnalysisOptions opts = analysis_options(cfg);
    const double theta = number(cfg, "theta", 0.0);
    const FamilyPtr family = make_family(model);
    const GridPtr grid = make_grid(model, *family);
    const ModelState state = family->evaluate(theta, grid);
    const Analysis a = analyze(*family, grid, opts);
    if (!a.detection) raise(ErrorCode::ZeroDetectionMode, "model " + model.model + " has no detection mode");

    write_field_csv(inv.out / "mean_field.csv", state.mean_field);
    json files = json::array();
    const ModeBasis &basis = a.detection->basis;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "detection_%02zu.csv", i);
        write_field_csv(inv.out / name, basis[i]);
        files.push_back(name);
    }
    const ComplexMatrix gram = basis.gram();
    const double defect =
        (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    json summary{{"model", to_json(model)},
                 {"theta", theta},
                 {"mean_field", "mean_field.csv"},
                 {"photon_number", norm_sq(state.mean_field)},
                 {"detection_basis", files},
                 {"gram_defect", defect},
                 {"a_prime_norm_sq", a.inputs.a_prime_norm_sq}};
    if (norm_sq(state.mean_field) > 0.0) {
        write_field_csv(inv.out / "mean_field_mode.csv", mean_field_mode(state.mean_field));
        summary["mean_field_mode"] = "mean_field_mode.csv";
    }
    write_json(inv.out / "basis.json", summary);
    out << "detection basis of " << basis.size() << " modes written to " << inv.out.string()
        << " (Gram defect " << format_double(defect) << ")\n";
    return kExitSuccess;
}

int dispatch(const Invocation &inv, const json &cfg, std::ostream &out, std::ostream &err) {
    require_version(cfg);
    if (inv.command == "bound") return cmd_bound(inv, cfg, out);
    if (inv.command == "oracle-check") return cmd_oracle_check(inv, cfg, out, err);
    if (inv.command == "simulate") return cmd_simulate(inv, cfg, out);
    if (inv.command == "allocate") return cmd_allocate(inv, cfg, out);
    if (inv.command == "sweep") return cmd_sweep(inv, cfg, out);
    if (inv.command == "modes") return cmd_modes(inv, cfg, out);
    raise(ErrorCode::ConfigError, "unknown command '" + inv.command + "'");
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoInformation:
        case ErrorCode::ZeroDetectionMode:
        case ErrorCode::ZeroMeanField:
        case ErrorCode::BasisDeficient:
        case ErrorCode::PurityError:
        case ErrorCode::CovarianceError:
            return kExitDegenerate;
        default:
            return kExitConfig;
    }
}

unsigned resolve_threads(std::optional<unsigned> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char *env = std::getenv("GQCR_THREADS")) {
        char *end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int execute(const Invocation &inv, const json &config, std::ostream &out, std::ostream &err) {
    try {
        return dispatch(inv, config, out, err);
    } catch (const Error &e) {
        err << "gqcr: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const json::exception &e) {
        err << "gqcr: ConfigError: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "gqcr: internal error: " << e.what() << '\n';
        return 1;
    }
}

int execute(const Invocation &inv, std::ostream &out, std::ostream &err) {
    json config;
    try {
        config = json::parse(read_text_file(inv.config));
    } catch (const Error &e) {
        err << "gqcr: " << e.what() << '\n';
        return kExitConfig;
    } catch (const json::exception &e) {
        err << "gqcr: ConfigError: " << inv.config.string() << ": " << e.what() << '\n';
        return kExitConfig;
    }
    return execute(inv, config, out, err);
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum Cramer-Rao bounds for pure Gaussian multimode states", "gqcr"};
    Invocation inv;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("command", inv.command, "bound | oracle-check | simulate | allocate | sweep | modes")
        ->required()
        ->check(CLI::IsMember({"bound", "oracle-check", "simulate", "allocate", "sweep", "modes"}));
    app.add_option("--config", inv.config, "JSON configuration file")->required();
    app.add_option("--out", inv.out, "output directory")->capture_default_str();
    auto *seed_opt = app.add_option("--seed", seed, "override the configured seed");
    auto *threads_opt = app.add_option("--threads", threads, "worker threads (fallback: GQCR_THREADS)")
                            ->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitConfig;
    }
    if (*seed_opt) inv.seed = seed;
    if (*threads_opt) inv.threads = threads;
    return execute(inv, out, err);
}

}  // namespace gqcr::cli
