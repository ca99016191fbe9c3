#include "hamfin/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "hamfin/errors.hpp"
#include "hamfin/rng.hpp"

namespace hamfin {

void SDEParams::validate() const {
    if (!(S0 > 0.0) || !std::isfinite(S0)) throw ParameterError("SDEParams: S0 must be > 0");
    if (!std::isfinite(phi)) throw ParameterError("SDEParams: phi must be finite");
    if (model == SDEModel::gbm) {
        if (sigma < 0.0 || !std::isfinite(sigma))
            throw ParameterError("SDEParams: sigma must be finite and >= 0");
    } else {
        if (!(V0 > 0.0) || !std::isfinite(V0)) throw ParameterError("SDEParams: V0 must be > 0");
        mg.validate();
    }
}

namespace {

struct PathAccum {
    // per-path increment moments for the realized noise correlation
    double s1 = 0.0, s2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
    std::size_t floor_hits = 0;
};

void run_gbm_path(const SDEParams& p, double dt, std::size_t n_steps, PathRng& rng, double& s_out) {
    // per-step lognormal increment (exact for constant coefficients)
    const double drift = (p.phi - 0.5 * p.sigma * p.sigma) * dt;
    const double vol = p.sigma * std::sqrt(dt);
    double x = std::log(p.S0);
    for (std::size_t k = 0; k < n_steps; ++k) x += drift + vol * rng.normal();
    s_out = std::exp(x);
}

void run_mg_path(const SDEParams& p, double dt, std::size_t n_steps, PathRng& rng, double& s_out,
                 double& v_out, PathAccum& acc) {
    const double sqdt = std::sqrt(dt);
    const double rho = p.mg.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    double s = p.S0;
    double v = p.V0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double w1 = z1;
        const double w2 = rho * z1 + rho_c * z2;
        acc.s1 += w1;
        acc.s2 += w2;
        acc.s11 += w1 * w1;
        acc.s22 += w2 * w2;
        acc.s12 += w1 * w2;
        if (v < 0.0) ++acc.floor_hits;
        const double v_pos = std::max(v, 0.0);
        const double s_new = s + p.phi * s * dt + s * std::sqrt(v_pos) * sqdt * w1;
        const double v_new =
            v + (p.mg.lambda + p.mg.mu * v) * dt + p.mg.zeta * std::pow(v_pos, p.mg.alpha) * sqdt * w2;
        s = std::max(s_new, 1e-300);  // Euler on raw S admits (rare) negative excursions
        v = v_new;
    }
    s_out = s;
    v_out = std::max(v, 0.0);
}

} // namespace

PathEnsemble simulate(const SDEParams& params, double T, std::size_t n_steps, std::size_t n_paths,
                      std::uint64_t seed, unsigned n_workers) {
    params.validate();
    if (!(T > 0.0)) throw ParameterError("simulate: T must be > 0");
    if (n_steps < 1 || n_paths < 1) throw ParameterError("simulate: n_steps, n_paths must be >= 1");

    PathEnsemble e;
    e.model = params.model;
    e.n_paths = n_paths;
    e.n_steps = n_steps;
    e.dt = T / double(n_steps);
    e.T = T;
    e.seed = seed;
    e.phi = params.phi;
    e.S0 = params.S0;
    e.terminal_S.assign(n_paths, 0.0);
    const bool mg = params.model == SDEModel::mg;
    if (mg) e.terminal_V.assign(n_paths, 0.0);
    std::vector<PathAccum> accs(mg ? n_paths : 0);

    if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, 16);

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            PathRng rng(seed, i);
            if (mg)
                run_mg_path(params, e.dt, n_steps, rng, e.terminal_S[i], e.terminal_V[i], accs[i]);
            else
                run_gbm_path(params, e.dt, n_steps, rng, e.terminal_S[i]);
        }
    };
    if (n_workers <= 1 || n_paths < 1024) {
        work(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + n_workers - 1) / n_workers;
        for (unsigned w = 0; w < n_workers; ++w) {
            const std::size_t lo = std::min<std::size_t>(std::size_t(w) * chunk, n_paths);
            const std::size_t hi = std::min<std::size_t>(lo + chunk, n_paths);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    if (mg) {
        // fixed-order reduction keeps the summary worker-count independent
        double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
        std::size_t hits = 0;
        for (const auto& a : accs) {
            s1 += a.s1;
            s2 += a.s2;
            s11 += a.s11;
            s22 += a.s22;
            s12 += a.s12;
            hits += a.floor_hits;
        }
        const double n = double(n_paths) * double(n_steps);
        const double cov = s12 / n - (s1 / n) * (s2 / n);
        const double var1 = s11 / n - (s1 / n) * (s1 / n);
        const double var2 = s22 / n - (s2 / n) * (s2 / n);
        e.realized_noise_correlation =
            var1 > 0.0 && var2 > 0.0 ? cov / std::sqrt(var1 * var2) : 0.0;
        e.floor_hit_fraction = double(hits) / n;
        e.stability_warning = e.floor_hit_fraction > 0.01;
    }
    return e;
}

MartingaleStat martingale_test(const PathEnsemble& e, double r, double T) {
    if (e.n_paths < 2) throw ParameterError("martingale_test: needs at least 2 paths");
    const double df = std::exp(-r * T);
    double mean = 0.0;
    for (double s : e.terminal_S) mean += df * s;
    mean /= double(e.n_paths);
    double var = 0.0;
    for (double s : e.terminal_S) {
        const double d = df * s - mean;
        var += d * d;
    }
    var /= double(e.n_paths - 1);
    MartingaleStat stat;
    stat.discounted_mean = mean;
    stat.std_error = std::sqrt(var / double(e.n_paths));
    stat.z_score = stat.std_error > 0.0 ? (mean - e.S0) / stat.std_error
                                        : (mean == e.S0 ? 0.0 : std::numeric_limits<double>::infinity());
    stat.expected_fail = std::abs(e.phi - r) > 1e-14;
    return stat;
}

std::pair<double, double> mc_price(const PathEnsemble& e, const PayoffSpec& payoff, double r,
                                   double T) {
    if (e.n_paths < 2) throw ParameterError("mc_price: needs at least 2 paths");
    const double df = std::exp(-r * T);
    double mean = 0.0;
    std::vector<double> vals(e.n_paths);
    for (std::size_t i = 0; i < e.n_paths; ++i) {
        vals[i] = df * payoff.value_from_price(e.terminal_S[i]);
        mean += vals[i];
    }
    mean /= double(e.n_paths);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= double(e.n_paths - 1);
    return {mean, std::sqrt(var / double(e.n_paths))};
}

} // namespace hamfin
