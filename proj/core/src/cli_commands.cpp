#include "hamfin/cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include <json.hpp>

#include "hamfin/errors.hpp"
#include "hamfin/evolution.hpp"
#include "hamfin/martingale.hpp"
#include "hamfin/operators.hpp"
#include "hamfin/potentials.hpp"
#include "hamfin/simulate.hpp"

namespace hamfin::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

void atomic_write(const std::string& dir, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path target = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParameterError("cannot write output file: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

void write_json(const std::string& dir, const std::string& name, const ordered_json& j) {
    atomic_write(dir, name, j.dump(2) + "\n");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ordered_json config_echo(const RunConfig& cfg) {
    ordered_json j;
    for (const auto& [section, keys] : cfg.sections()) {
        ordered_json s;
        for (const auto& [k, v] : keys) s[k] = v;
        j[section] = s;
    }
    return j;
}

// ---------------------------------------------------------------------------
// config readers shared across subcommands
// ---------------------------------------------------------------------------

const std::set<std::string> kModelKeys = {"type", "r",    "sigma", "lambda", "mu",
                                          "zeta", "rho",  "alpha", "v0"};
const std::set<std::string> kGridKeys = {"x_min", "x_max", "n_x", "y_min", "y_max", "n_y"};
const std::set<std::string> kEvolutionKeys = {"T",      "n_steps",    "scheme",     "payoff",
                                              "strike", "spot",       "kind",       "barrier",
                                              "barrier_lo", "barrier_hi"};
const std::set<std::string> kMcKeys = {"n_paths", "n_steps",        "T",         "seed",
                                       "phi",     "s0",             "workers",   "compare_oracle",
                                       "rho_sweep", "export_paths"};
// [analysis] keys, per subcommand
const std::set<std::string> kMartingaleAnalysisKeys = {"state", "refinements", "tol", "y"};
const std::set<std::string> kVacuumAnalysisKeys = {"y",         "extended",  "tol",
                                                   "sweep",     "sweep_min", "sweep_max",
                                                   "sweep_count"};
const std::set<std::string> kHermitizeAnalysisKeys = {"potential", "v", "potential_file",
                                                      "n_eigen"};
const std::set<std::string> kSsbAnalysisKeys = {"mu2", "omega", "window", "s_max", "n_samples"};

std::string model_type(const RunConfig& cfg) {
    const std::string t = cfg.get_string("model", "type");
    if (t != "bs" && t != "mg")
        throw ParameterError("config [model] type: expected 'bs' or 'mg', got '" + t + "'");
    return t;
}

BSParams read_bs(const RunConfig& cfg) {
    BSParams p;
    p.r = cfg.get_double("model", "r");
    p.sigma = cfg.get_double("model", "sigma");
    p.validate();
    return p;
}

MGParams read_mg(const RunConfig& cfg) {
    MGParams p;
    p.r = cfg.get_double("model", "r");
    p.lambda = cfg.get_double("model", "lambda");
    p.mu = cfg.get_double("model", "mu");
    p.zeta = cfg.get_double("model", "zeta");
    p.rho = cfg.get_double("model", "rho");
    p.alpha = cfg.get_double("model", "alpha");
    p.validate();
    return p;
}

std::size_t read_count(const RunConfig& cfg, const std::string& sec, const std::string& key,
                       long fallback) {
    const long v = cfg.get_int(sec, key, fallback);
    if (v < 1) throw ParameterError("config [" + sec + "] " + key + ": must be >= 1");
    return std::size_t(v);
}

EvolutionConfig read_evolution(const RunConfig& cfg) {
    EvolutionConfig e;
    e.T = cfg.get_double("evolution", "T");
    e.n_steps = read_count(cfg, "evolution", "n_steps", 256);
    const std::string s = cfg.get_string("evolution", "scheme", "crank-nicolson");
    if (s == "crank-nicolson")
        e.scheme = Scheme::crank_nicolson;
    else if (s == "implicit-euler")
        e.scheme = Scheme::implicit_euler;
    else
        throw ParameterError("config [evolution] scheme: unknown scheme '" + s + "'");
    e.validate();
    return e;
}

PayoffSpec read_payoff(const RunConfig& cfg) {
    const std::string p = cfg.get_string("evolution", "payoff", "call");
    const double strike = cfg.get_double("evolution", "strike");
    if (p == "call") return PayoffSpec::call(strike);
    if (p == "put") return PayoffSpec::put(strike);
    throw ParameterError("config [evolution] payoff: expected 'call' or 'put', got '" + p + "'");
}

PotentialSpec read_potential(const RunConfig& cfg, double fallback_constant) {
    const std::string kind = cfg.get_string("analysis", "potential", "constant");
    if (kind == "constant")
        return PotentialSpec::constant(cfg.get_double("analysis", "v", fallback_constant));
    if (kind == "table")
        return load_potential_csv(cfg.get_string("analysis", "potential_file"));
    throw ParameterError("config [analysis] potential: expected 'constant' or 'table'");
}

} // namespace

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

int cmd_price(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("grid", kGridKeys);
    cfg.require_known_keys("evolution", kEvolutionKeys);

    const std::string type = model_type(cfg);
    const EvolutionConfig evo = read_evolution(cfg);
    const PayoffSpec payoff = read_payoff(cfg);
    const double spot = cfg.get_double("evolution", "spot");
    if (!(spot > 0.0)) throw ParameterError("config [evolution] spot: must be > 0");
    const std::string kind = cfg.get_string("evolution", "kind", "vanilla");

    PricingResult result;
    ordered_json report;
    report["config"] = config_echo(cfg);
    report["model"] = type;
    report["kind"] = kind;

    if (type == "bs") {
        const BSParams p = read_bs(cfg);
        const GridSpec fallback = default_pricing_grid(spot, p.sigma, evo.T, 2049);
        const GridSpec grid = GridSpec::make_1d(cfg.get_double("grid", "x_min", fallback.x_min),
                                                cfg.get_double("grid", "x_max", fallback.x_max),
                                                read_count(cfg, "grid", "n_x", 2049));
        if (kind == "vanilla") {
            result = price_bs_vanilla(grid, p, payoff, evo, {spot});
            const double oracle = bs_closed_form(spot, payoff.strike, p.r, p.sigma, evo.T, payoff.kind);
            report["oracle"]["closed_form"] = oracle;
            report["oracle"]["abs_rel_err"] =
                std::abs(result.price_at.front().second - oracle) / std::abs(oracle);
        } else if (kind == "down-and-out") {
            const double barrier = cfg.get_double("evolution", "barrier");
            if (barrier >= spot)
                throw ParameterError("down-and-out: spot must lie above the barrier");
            result = price_down_and_out(grid, p, barrier, payoff, evo, {spot});
        } else if (kind == "double-knock-out") {
            const double b_lo = cfg.get_double("evolution", "barrier_lo");
            const double b_hi = cfg.get_double("evolution", "barrier_hi");
            if (!(b_lo < spot && spot < b_hi))
                throw ParameterError("double-knock-out: spot must lie between the barriers");
            result = price_double_knock_out(grid, p, b_lo, b_hi, payoff, evo, {spot});
        } else {
            throw ParameterError("config [evolution] kind: unknown option kind '" + kind + "'");
        }
    } else {
        if (kind != "vanilla")
            throw ParameterError("mg pricing supports kind = vanilla only");
        const MGParams p = read_mg(cfg);
        const double v0 = cfg.get_double("model", "v0");
        if (!(v0 > 0.0)) throw ParameterError("config [model] v0: must be > 0");
        const GridSpec fallback = default_pricing_grid(spot, std::sqrt(v0), evo.T, 257);
        const GridSpec grid = GridSpec::make_2d(cfg.get_double("grid", "x_min", fallback.x_min),
                                                cfg.get_double("grid", "x_max", fallback.x_max),
                                                read_count(cfg, "grid", "n_x", 257),
                                                cfg.get_double("grid", "y_min", std::log(v0) - 2.0),
                                                cfg.get_double("grid", "y_max", std::log(v0) + 2.0),
                                                read_count(cfg, "grid", "n_y", 257));
        result = price_mg_vanilla(grid, p, v0, payoff, evo, {spot});
    }

    // price.csv: one row per x node (2D: slice at ln V0)
    std::string csv = "S,price\n";
    const GridSpec& g = result.diagnostics.grid;
    if (!g.is_2d()) {
        for (std::size_t i = 0; i < g.n_x; ++i)
            csv += fmt(std::exp(g.x(i))) + "," + fmt(result.field[i]) + "\n";
    } else {
        const double y0 = std::log(cfg.get_double("model", "v0"));
        for (std::size_t i = 0; i < g.n_x; ++i)
            csv += fmt(std::exp(g.x(i))) + "," +
                   fmt(interpolate_2d(g, result.field, g.x(i), y0)) + "\n";
    }
    atomic_write(opt.out_dir, "price.csv", csv);

    ordered_json prices = ordered_json::array();
    for (auto [s, v] : result.price_at) prices.push_back({{"spot", s}, {"price", v}});
    report["price_at"] = prices;
    report["diagnostics"] = {{"scheme", result.diagnostics.scheme},
                             {"steps", result.diagnostics.steps},
                             {"grid", {{"x_min", g.x_min},
                                       {"x_max", g.x_max},
                                       {"n_x", g.n_x},
                                       {"n_y", g.n_y}}}};
    write_json(opt.out_dir, "report.json", report);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// martingale
// ---------------------------------------------------------------------------

int cmd_martingale(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("grid", kGridKeys);
    cfg.require_known_keys("analysis", kMartingaleAnalysisKeys);

    const std::string type = model_type(cfg);
    const std::string state = cfg.get_string("analysis", "state", "e^x");
    const double tol = opt.tol.value_or(cfg.get_double("analysis", "tol", 1e-10));

    std::vector<std::size_t> levels;
    if (cfg.has("analysis", "refinements")) {
        for (double v : cfg.get_double_list("analysis", "refinements"))
            levels.push_back(std::size_t(v));
    } else {
        levels = {257, 513, 1025};
    }

    const double x_lo = cfg.get_double("grid", "x_min", -4.0);
    const double x_hi = cfg.get_double("grid", "x_max", 4.0);

    ordered_json out;
    out["config"] = config_echo(cfg);
    out["state"] = state;
    ordered_json level_rows = ordered_json::array();
    std::vector<std::pair<double, double>> order_pts;
    std::optional<double> constraint;

    for (std::size_t n : levels) {
        MartingaleReport rep;
        double h = 0.0;
        if (type == "bs" && state == "e^x") {
            const BSParams p = read_bs(cfg);
            const GridSpec g = GridSpec::make_1d(x_lo, x_hi, n);
            rep = martingale_residual(build_bs_hamiltonian(g, p),
                                      sample_x(g, [](double x) { return std::exp(x); }, "e^x"));
            h = g.h_x();
        } else if (type == "mg" && state == "e^x") {
            const MGParams p = read_mg(cfg);
            const double y = cfg.get_double("analysis", "y", 0.0);
            const GridSpec g = GridSpec::make_1d(x_lo, x_hi, n);
            rep = martingale_residual(build_mg_fixed_y_hamiltonian(g, p, y),
                                      sample_x(g, [](double x) { return std::exp(x); }, "e^x"));
            h = g.h_x();
        } else if (type == "mg" && state == "e^{x+y}") {
            const MGParams p = read_mg(cfg);
            const double y_lo = cfg.get_double("grid", "y_min", -1.0);
            const double y_hi = cfg.get_double("grid", "y_max", 1.0);
            const GridSpec g = GridSpec::make_2d(x_lo, x_hi, n, y_lo, y_hi, n);
            rep = martingale_residual(
                build_mg_hamiltonian(g, p),
                sample_xy(g, [](double x, double y) { return std::exp(x + y); }, "e^{x+y}"));
            h = std::max(g.h_x(), g.h_y());
            double worst = 0.0;
            for (std::size_t j = 0; j < g.n_y; ++j)
                worst = std::max(worst, std::abs(extended_constraint_residual(p, g.y(j))));
            constraint = worst;
        } else {
            throw ParameterError("cmd_martingale: unsupported model/state combination '" + type +
                                 "'/'" + state + "'");
        }
        level_rows.push_back({{"n", n},
                              {"h", h},
                              {"interior_residual_max", rep.interior_residual_max},
                              {"interior_residual_l2", rep.interior_residual_l2}});
        order_pts.emplace_back(h, rep.interior_residual_max);
    }
    out["levels"] = level_rows;
    if (constraint) out["constraint_residual"] = *constraint;

    const bool constraint_ok = !constraint || std::abs(*constraint) <= tol;
    if (order_pts.size() >= 3 && constraint_ok)
        out["refinement_order"] = estimate_order(order_pts);
    write_json(opt.out_dir, "martingale.json", out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// vacuum
// ---------------------------------------------------------------------------

namespace {

ordered_json degeneracy_json(const DegeneracyClass& c) {
    ordered_json j;
    j["class"] = c.single ? "single" : "degenerate";
    ordered_json reasons = ordered_json::array();
    for (auto r : c.reasons) reasons.push_back(to_string(r));
    j["reasons"] = reasons;
    return j;
}

} // namespace

int cmd_vacuum(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("grid", kGridKeys);
    cfg.require_known_keys("analysis", kVacuumAnalysisKeys);

    const std::string type = model_type(cfg);
    const double tol = opt.tol.value_or(cfg.get_double("analysis", "tol", 1e-10));
    const bool extended = cfg.get_bool("analysis", "extended", false);

    ordered_json out;
    out["config"] = config_echo(cfg);
    out["model"] = type;

    double phi_closed = 0.0;
    if (type == "bs") {
        const BSParams p = read_bs(cfg);
        phi_closed = bs_vacuum_field(p, SignConvention::closed_form).phi_x_vac;
        out["phi_x_vac"] = {{"closed_form", phi_closed},
                            {"stationary_point",
                             bs_vacuum_field(p, SignConvention::stationary_point).phi_x_vac}};
        out["sign_note"] =
            "the closed form and the stationary point of the quadratic agree in magnitude and "
            "differ in sign; both conventions are reported";
        out["degeneracy"] = degeneracy_json(classify_degeneracy(p, tol));
    } else {
        const MGParams p = read_mg(cfg);
        const double y = cfg.get_double("analysis", "y", 0.0);
        phi_closed = mg_vacuum_field(p, y, SignConvention::closed_form).phi_x_vac;
        out["y"] = y;
        out["phi_x_vac"] = {{"closed_form", phi_closed},
                            {"stationary_point",
                             mg_vacuum_field(p, y, SignConvention::stationary_point).phi_x_vac}};
        out["sign_note"] =
            "the closed form and the stationary point of the quadratic agree in magnitude and "
            "differ in sign; both conventions are reported";
        out["degeneracy"] = degeneracy_json(classify_degeneracy(p, y, extended, tol));
        if (extended) {
            // throws DegenerateSystemError (exit 3) when zeta == 0
            const VacuumFields f = solve_mg_vacuum_system(p, y);
            const auto [r1, r2] = mg_vacuum_system_residuals(p, y, f.phi_x_vac, *f.phi_y_vac);
            out["vacuum_system"] = {{"phi_x_vac", f.phi_x_vac},
                                    {"phi_y_vac", *f.phi_y_vac},
                                    {"convention", to_string(f.convention)},
                                    {"residuals", {r1, r2}},
                                    {"constraint_residual", extended_constraint_residual(p, y)}};
        }
    }

    if (cfg.has_section("grid")) {
        const GridSpec g = GridSpec::make_1d(cfg.get_double("grid", "x_min", -4.0),
                                             cfg.get_double("grid", "x_max", 4.0),
                                             read_count(cfg, "grid", "n_x", 257));
        ordered_json checks = ordered_json::array();
        for (const auto& c : s_vac_powers(phi_closed, 3, g))
            checks.push_back({{"n", c.n}, {"value", c.value}, {"on_grid", c.on_grid}});
        out["s_vac_checks"] = checks;
    }

    // optional sweep over r
    if (cfg.get_string("analysis", "sweep", "") == "r") {
        const double lo = cfg.get_double("analysis", "sweep_min");
        const double hi = cfg.get_double("analysis", "sweep_max");
        const std::size_t count = read_count(cfg, "analysis", "sweep_count", 101);
        if (!(lo < hi) || count < 2) throw ParameterError("vacuum sweep: bad range");
        std::string csv = "r,phi_vac_closed_form,phi_vac_stationary,class\n";
        for (std::size_t i = 0; i < count; ++i) {
            const double r = lo + (hi - lo) * double(i) / double(count - 1);
            if (type == "bs") {
                BSParams p = read_bs(cfg);
                p.r = r;
                const auto cls = classify_degeneracy(p, tol);
                csv += fmt(r) + "," + fmt(bs_vacuum_field(p).phi_x_vac) + "," +
                       fmt(bs_vacuum_field(p, SignConvention::stationary_point).phi_x_vac) + "," +
                       (cls.single ? "single" : "degenerate") + "\n";
            } else {
                MGParams p = read_mg(cfg);
                p.r = r;
                const double y = cfg.get_double("analysis", "y", 0.0);
                const auto cls = classify_degeneracy(p, y, extended, tol);
                csv += fmt(r) + "," + fmt(mg_vacuum_field(p, y).phi_x_vac) + "," +
                       fmt(mg_vacuum_field(p, y, SignConvention::stationary_point).phi_x_vac) +
                       "," + (cls.single ? "single" : "degenerate") + "\n";
            }
        }
        atomic_write(opt.out_dir, "vacuum_sweep.csv", csv);
    }

    write_json(opt.out_dir, "vacuum.json", out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// hermitize
// ---------------------------------------------------------------------------

int cmd_hermitize(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("grid", kGridKeys);
    cfg.require_known_keys("analysis", kHermitizeAnalysisKeys);

    const double sigma = cfg.get_double("model", "sigma");
    const double r = cfg.get_double("model", "r", 0.0);
    const PotentialSpec V = read_potential(cfg, r);

    const GridSpec grid = GridSpec::make_1d(cfg.get_double("grid", "x_min", -3.0),
                                            cfg.get_double("grid", "x_max", 3.0),
                                            read_count(cfg, "grid", "n_x", 4001));
    const HermitizationResult res = hermitize(grid, sigma, V);

    const std::size_t n_eig =
        std::min<std::size_t>(read_count(cfg, "analysis", "n_eigen", 512), 512);
    const GridSpec eig_grid = GridSpec::make_1d(grid.x_min, grid.x_max, n_eig);
    const double imag_defect =
        max_relative_imag_eigenvalue(hermitize(eig_grid, sigma, V).H_herm);

    ordered_json out;
    out["config"] = config_echo(cfg);
    if (std::isfinite(res.alpha)) {
        out["alpha"] = res.alpha;
        out["gamma"] = res.gamma;
    }
    out["similarity_residual"] = res.similarity_residual;
    out["max_relative_imag_eigenvalue"] = imag_defect;
    out["eigen_n"] = n_eig;
    out["s_range"] = {res.s_field.values.front(), res.s_field.values.back()};
    write_json(opt.out_dir, "hermitize.json", out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("mc", kMcKeys);
    cfg.require_known_keys("evolution", kEvolutionKeys);

    const std::string type = model_type(cfg);
    const double r = cfg.get_double("model", "r");

    SDEParams p;
    p.S0 = cfg.get_double("mc", "s0");
    p.phi = cfg.get_double("mc", "phi", r);
    if (type == "bs") {
        p.model = SDEModel::gbm;
        p.sigma = cfg.get_double("model", "sigma");
    } else {
        p.model = SDEModel::mg;
        p.mg = read_mg(cfg);
        p.V0 = cfg.get_double("model", "v0");
    }

    const double T = cfg.get_double("mc", "T");
    const std::size_t n_steps = read_count(cfg, "mc", "n_steps", 1);
    const std::size_t n_paths = read_count(cfg, "mc", "n_paths", 100000);
    const std::uint64_t seed = opt.seed.value_or(std::uint64_t(cfg.get_int("mc", "seed", 42)));
    const unsigned workers = unsigned(cfg.get_int("mc", "workers", 0));

    const PathEnsemble e = simulate(p, T, n_steps, n_paths, seed, workers);
    const MartingaleStat stat = martingale_test(e, r, T);

    ordered_json out;
    out["config"] = config_echo(cfg);
    out["model"] = type;
    out["seed"] = seed;
    out["n_paths"] = n_paths;
    out["n_steps"] = n_steps;
    out["martingale"] = {{"discounted_mean", stat.discounted_mean},
                         {"std_error", stat.std_error},
                         {"z_score", stat.z_score}};
    out["expected_fail"] = stat.expected_fail;
    if (type == "mg") {
        out["realized_noise_correlation"] = e.realized_noise_correlation;
        out["floor_hit_fraction"] = e.floor_hit_fraction;
        out["stability_warning"] = e.stability_warning;
    }

    if (cfg.get_bool("mc", "compare_oracle", false)) {
        if (type != "bs")
            throw ParameterError("mc compare_oracle: closed-form comparison is bs-only");
        const PayoffSpec payoff = read_payoff(cfg);
        const auto [mc, se] = mc_price(e, payoff, r, T);
        const double oracle = bs_closed_form(p.S0, payoff.strike, r, p.sigma, T, payoff.kind);
        out["price"] = {{"mc", mc},
                        {"std_error", se},
                        {"closed_form", oracle},
                        {"abs_diff", std::abs(mc - oracle)}};
    }

    if (cfg.get_bool("mc", "export_paths", false)) {
        const bool with_v = type == "mg";
        std::string csv = with_v ? "path,terminal_S,terminal_V\n" : "path,terminal_S\n";
        for (std::size_t i = 0; i < e.n_paths; ++i) {
            csv += std::to_string(i) + "," + fmt(e.terminal_S[i]);
            if (with_v) csv += "," + fmt(e.terminal_V[i]);
            csv += "\n";
        }
        atomic_write(opt.out_dir, "paths.csv", csv);
    }

    if (cfg.has("mc", "rho_sweep")) {
        if (type != "mg") throw ParameterError("mc rho_sweep: mg model only");
        std::string csv = "rho_in,rho_realized\n";
        for (double rho : cfg.get_double_list("mc", "rho_sweep")) {
            SDEParams q = p;
            q.mg.rho = rho;
            q.mg.validate();
            const PathEnsemble sweep_e = simulate(q, T, n_steps, n_paths, seed, workers);
            csv += fmt(rho) + "," + fmt(sweep_e.realized_noise_correlation) + "\n";
        }
        atomic_write(opt.out_dir, "rho_sweep.csv", csv);
    }

    write_json(opt.out_dir, "mc.json", out);
    return e.stability_warning ? exit_numerical : exit_ok;
}

// ---------------------------------------------------------------------------
// ssb
// ---------------------------------------------------------------------------

int cmd_ssb(const CmdOptions& opt) {
    RunConfig cfg = RunConfig::parse_file(opt.config_path);
    cfg.require_known_keys("model", kModelKeys);
    cfg.require_known_keys("grid", kGridKeys);
    cfg.require_known_keys("analysis", kSsbAnalysisKeys);

    const double mu2 = cfg.get_double("analysis", "mu2");
    const double omega = cfg.get_double("analysis", "omega");
    const PotentialSpec q = PotentialSpec::quartic(mu2, omega);
    const VacuumManifold m = quartic_vacuum(q);

    ordered_json out;
    out["config"] = config_echo(cfg);
    out["magnitude"] = m.magnitude;
    out["representatives"] = m.representatives;
    out["multiplicity_note"] = m.multiplicity_note;
    out["potential_at_vacuum"] = q.eval_field(m.magnitude);
    out["potential_at_zero"] = q.eval_field(0.0);

    // The stationarity condition gives |S| = sqrt(mu2/(2 omega)); the
    // alternative printed form mu/(sqrt(2) omega) only matches at omega = 1.
    const double alt = std::sqrt(mu2) / (std::sqrt(2.0) * omega);
    out["magnitude_alternative_form"] = alt;
    out["forms_agree"] = std::abs(alt - m.magnitude) <= 1e-12 * std::max(1.0, m.magnitude);
    out["magnitude_note"] =
        "magnitude follows the stationarity condition sqrt(mu2/(2*omega)); the alternative "
        "closed form mu/(sqrt(2)*omega) disagrees unless omega = 1";

    // flatness of the kinetic sector near the vacuum, against a BS base operator
    const double window = cfg.get_double("analysis", "window", 0.5);
    BSParams bp;
    bp.r = cfg.get_double("model", "r", 0.05);
    bp.sigma = cfg.get_double("model", "sigma", 0.2);
    const GridSpec grid = GridSpec::make_1d(cfg.get_double("grid", "x_min", -4.0),
                                            cfg.get_double("grid", "x_max", 4.0),
                                            read_count(cfg, "grid", "n_x", 257));
    const FlatnessReport flat = quartic_flatness_report(q, build_bs_hamiltonian(grid, bp), window);
    out["flatness"] = {{"window", flat.window},
                       {"ratio_constant_field", flat.ratio_constant},
                       {"ratio_bump", flat.ratio_bump},
                       {"kinetic_l2_bump", flat.kinetic_l2_bump},
                       {"potential_l2_bump", flat.potential_l2_bump}};

    // V(S) samples for plotting
    const double s_max = cfg.get_double("analysis", "s_max", 2.0 * m.magnitude);
    const std::size_t n_samples = read_count(cfg, "analysis", "n_samples", 401);
    std::string csv = "S,V\n";
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double s = -s_max + 2.0 * s_max * double(i) / double(n_samples - 1);
        csv += fmt(s) + "," + fmt(q.eval_field(s)) + "\n";
    }
    atomic_write(opt.out_dir, "ssb_potential.csv", csv);

    write_json(opt.out_dir, "ssb.json", out);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

int run_command(const std::string& name, const CmdOptions& opt) {
    try {
        if (name == "price") return cmd_price(opt);
        if (name == "martingale") return cmd_martingale(opt);
        if (name == "vacuum") return cmd_vacuum(opt);
        if (name == "hermitize") return cmd_hermitize(opt);
        if (name == "simulate") return cmd_simulate(opt);
        if (name == "ssb") return cmd_ssb(opt);
        std::cerr << "unknown subcommand: " << name << "\n";
        return exit_config;
    } catch (const DegenerateSystemError& e) {
        std::cerr << "constraint conflict: " << e.what() << "\n";
        return exit_constraint;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const RangeError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

} // namespace hamfin::cli
