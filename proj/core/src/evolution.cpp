#include "hamfin/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "hamfin/errors.hpp"
#include "hamfin/operators.hpp"

namespace hamfin {

PayoffSpec PayoffSpec::call(double K) {
    if (!(K > 0.0)) throw ParameterError("PayoffSpec: strike must be > 0");
    PayoffSpec p;
    p.kind = PayoffKind::call;
    p.strike = K;
    return p;
}

PayoffSpec PayoffSpec::put(double K) {
    if (!(K > 0.0)) throw ParameterError("PayoffSpec: strike must be > 0");
    PayoffSpec p;
    p.kind = PayoffKind::put;
    p.strike = K;
    return p;
}

PayoffSpec PayoffSpec::custom(std::vector<std::pair<double, double>> t) {
    if (t.size() < 2) throw ParameterError("PayoffSpec: table needs at least 2 rows");
    if (!std::is_sorted(t.begin(), t.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw ParameterError("PayoffSpec: table must be sorted by x");
    PayoffSpec p;
    p.kind = PayoffKind::custom_table;
    p.table = std::move(t);
    return p;
}

double PayoffSpec::value(double x) const {
    switch (kind) {
        case PayoffKind::call: return std::max(std::exp(x) - strike, 0.0);
        case PayoffKind::put: return std::max(strike - std::exp(x), 0.0);
        case PayoffKind::custom_table: {
            if (x < table.front().first || x > table.back().first)
                throw ParameterError("PayoffSpec: x outside table range");
            auto it = std::lower_bound(table.begin(), table.end(), x,
                                       [](const auto& row, double q) { return row.first < q; });
            if (it == table.begin()) return it->second;
            const auto& [x1, v1] = *it;
            const auto& [x0, v0] = *(it - 1);
            return v0 + (x - x0) / (x1 - x0) * (v1 - v0);
        }
    }
    return 0.0;
}

double PayoffSpec::value_from_price(double S) const {
    switch (kind) {
        case PayoffKind::call: return std::max(S - strike, 0.0);
        case PayoffKind::put: return std::max(strike - S, 0.0);
        case PayoffKind::custom_table:
            if (!(S > 0.0)) throw ParameterError("PayoffSpec: custom table needs S > 0");
            return value(std::log(S));
    }
    return 0.0;
}

void PayoffSpec::validate(const GridSpec& grid) const {
    if (kind == PayoffKind::custom_table) {
        if (table.front().first > grid.x_min || table.back().first < grid.x_max)
            throw ParameterError("PayoffSpec: table does not cover the grid range");
    } else if (!(strike > 0.0)) {
        throw ParameterError("PayoffSpec: strike must be > 0");
    }
}

const char* to_string(Scheme s) {
    return s == Scheme::crank_nicolson ? "crank-nicolson" : "implicit-euler";
}

void EvolutionConfig::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("EvolutionConfig: T must be > 0");
    if (n_steps < 1) throw ParameterError("EvolutionConfig: n_steps must be >= 1");
}

BoundaryValues payoff_boundaries(const PayoffSpec& payoff, double r, const GridSpec& grid) {
    BoundaryValues b;
    const double x_lo = grid.x_min, x_hi = grid.x_max;
    switch (payoff.kind) {
        case PayoffKind::call: {
            const double K = payoff.strike;
            b.left = [](double) { return 0.0; };
            b.right = [=](double tau) { return std::exp(x_hi) - K * std::exp(-r * tau); };
            break;
        }
        case PayoffKind::put: {
            const double K = payoff.strike;
            b.left = [=](double tau) { return K * std::exp(-r * tau) - std::exp(x_lo); };
            b.right = [](double) { return 0.0; };
            break;
        }
        case PayoffKind::custom_table: {
            const double vl = payoff.value(x_lo), vr = payoff.value(x_hi);
            b.left = [=](double) { return vl; };
            b.right = [=](double) { return vr; };
            break;
        }
    }
    return b;
}

namespace {

// rows with ix on an x-edge are Dirichlet rows in the stepping systems
bool is_x_edge(const GridSpec& g, std::size_t r) {
    if (!g.is_2d()) return r == 0 || r == g.n_x - 1;
    const std::size_t ix = r / g.n_y;
    return ix == 0 || ix == g.n_x - 1;
}

long interior_bandwidth(const OperatorMatrix& H) {
    const GridSpec& g = H.grid();
    const std::size_t n = H.size();
    long band = 0;
    for (std::size_t k = 0; k < H.offsets().size(); ++k) {
        const long d = H.offsets()[k];
        const auto& diag = H.diagonal(k);
        const std::size_t r0 = d < 0 ? std::size_t(-d) : 0;
        const std::size_t r1 = d > 0 ? n - std::size_t(d) : n;
        for (std::size_t r = r0; r < r1; ++r) {
            if (diag[r] != 0.0 && !is_x_edge(g, r)) {
                band = std::max(band, d < 0 ? -d : d);
                break;
            }
        }
    }
    return std::max<long>(band, 1);
}

BandedLU factor_step_matrix(const OperatorMatrix& H, double theta_dt, long band) {
    const GridSpec& g = H.grid();
    const std::size_t n = H.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t r = 0; r < n; ++r)
        if (is_x_edge(g, r)) rows[r].emplace_back(r, 1.0);
    for (std::size_t k = 0; k < H.offsets().size(); ++k) {
        const long d = H.offsets()[k];
        const auto& diag = H.diagonal(k);
        const std::size_t r0 = d < 0 ? std::size_t(-d) : 0;
        const std::size_t r1 = d > 0 ? n - std::size_t(d) : n;
        for (std::size_t r = r0; r < r1; ++r) {
            if (is_x_edge(g, r) || diag[r] == 0.0) continue;
            rows[r].emplace_back(std::size_t(long(r) + d), theta_dt * diag[r]);
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        if (!is_x_edge(g, r)) rows[r].emplace_back(r, 1.0);
    return BandedLU(n, band, rows);
}

void set_x_edges(const GridSpec& g, std::vector<double>& v, double left, double right) {
    if (!g.is_2d()) {
        v.front() = left;
        v.back() = right;
        return;
    }
    for (std::size_t j = 0; j < g.n_y; ++j) {
        v[g.index(0, j)] = left;
        v[g.index(g.n_x - 1, j)] = right;
    }
}

} // namespace

ValueField evolve(const OperatorMatrix& H, const ValueField& terminal, const EvolutionConfig& cfg,
                  const BoundaryValues& boundary) {
    cfg.validate();
    const std::size_t n = H.size();
    if (terminal.size() != n) throw DimensionError("evolve: terminal field length mismatch");
    const GridSpec& g = H.grid();
    const double dt = cfg.T / double(cfg.n_steps);

    const std::size_t rannacher =
        cfg.scheme == Scheme::crank_nicolson ? std::min<std::size_t>(4, cfg.n_steps) : cfg.n_steps;
    const bool need_ie = rannacher > 0 || cfg.scheme == Scheme::implicit_euler;
    const bool need_cn = cfg.scheme == Scheme::crank_nicolson && cfg.n_steps > rannacher;

    const long band = interior_bandwidth(H);
    std::optional<BandedLU> lu_ie, lu_cn;
    try {
        if (need_ie) lu_ie.emplace(factor_step_matrix(H, dt, band));
        if (need_cn) lu_cn.emplace(factor_step_matrix(H, 0.5 * dt, band));
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("evolve: factorization failed: ") + e.what(), 0);
    }

    std::vector<double> c = terminal.values;
    set_x_edges(g, c, boundary.left(0.0), boundary.right(0.0));
    std::vector<double> rhs(n);

    for (std::size_t m = 0; m < cfg.n_steps; ++m) {
        const bool ie = cfg.scheme == Scheme::implicit_euler || m < rannacher;
        const double tau_next = double(m + 1) * dt;
        if (ie) {
            rhs = c;
        } else {
            // (I - dt/2 H) c on interior rows
            ValueField hc = H.apply(ValueField(c, ""));
            for (std::size_t r = 0; r < n; ++r) rhs[r] = c[r] - 0.5 * dt * hc[r];
        }
        set_x_edges(g, rhs, boundary.left(tau_next), boundary.right(tau_next));
        try {
            (ie ? *lu_ie : *lu_cn).solve(rhs);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("evolve: solve failed: ") + e.what(), long(m));
        }
        c.swap(rhs);
        set_x_edges(g, c, boundary.left(tau_next), boundary.right(tau_next));
    }
    ValueField out;
    out.label = "evolved(" + terminal.label + ")";
    out.values = std::move(c);
    return out;
}

ValueField evolve(const OperatorMatrix& H, const ValueField& terminal, const EvolutionConfig& cfg) {
    const GridSpec& g = H.grid();
    const double vl = g.is_2d() ? terminal[g.index(0, 0)] : terminal[0];
    const double vr = g.is_2d() ? terminal[g.index(g.n_x - 1, 0)] : terminal[g.n_x - 1];
    BoundaryValues b;
    b.left = [=](double) { return vl; };
    b.right = [=](double) { return vr; };
    return evolve(H, terminal, cfg, b);
}

double interpolate_1d(const GridSpec& grid, const ValueField& f, double x) {
    if (x < grid.x_min || x > grid.x_max)
        throw ParameterError("interpolate_1d: x outside grid range");
    const double t = (x - grid.x_min) / grid.h_x();
    const std::size_t i = std::min(std::size_t(t), grid.n_x - 2);
    const double frac = t - double(i);
    return f[i] + frac * (f[i + 1] - f[i]);
}

double interpolate_2d(const GridSpec& grid, const ValueField& f, double x, double y) {
    if (x < grid.x_min || x > grid.x_max || y < grid.y_min || y > grid.y_max)
        throw ParameterError("interpolate_2d: point outside grid range");
    const double tx = (x - grid.x_min) / grid.h_x();
    const double ty = (y - grid.y_min) / grid.h_y();
    const std::size_t i = std::min(std::size_t(tx), grid.n_x - 2);
    const std::size_t j = std::min(std::size_t(ty), grid.n_y - 2);
    const double fx = tx - double(i), fy = ty - double(j);
    const double v00 = f[grid.index(i, j)], v01 = f[grid.index(i, j + 1)];
    const double v10 = f[grid.index(i + 1, j)], v11 = f[grid.index(i + 1, j + 1)];
    const double v0 = v00 + fy * (v01 - v00);
    const double v1 = v10 + fy * (v11 - v10);
    return v0 + fx * (v1 - v0);
}

namespace {

PricingResult finish_1d(const GridSpec& grid, ValueField field, const EvolutionConfig& cfg,
                        const std::vector<double>& spots) {
    PricingResult res;
    res.diagnostics.scheme = to_string(cfg.scheme);
    res.diagnostics.steps = cfg.n_steps;
    res.diagnostics.grid = grid;
    for (double s : spots) {
        if (!(s > 0.0)) throw ParameterError("price query: spot must be > 0");
        res.price_at.emplace_back(s, interpolate_1d(grid, field, std::log(s)));
    }
    res.field = std::move(field);
    return res;
}

} // namespace

PricingResult price_bs_vanilla(const GridSpec& grid, const BSParams& p, const PayoffSpec& payoff,
                               const EvolutionConfig& cfg, const std::vector<double>& spots) {
    p.validate();
    payoff.validate(grid);
    const OperatorMatrix H = build_bs_hamiltonian(grid, p);
    ValueField terminal = sample_x(grid, [&](double x) { return payoff.value(x); }, "payoff");
    ValueField evolved = evolve(H, terminal, cfg, payoff_boundaries(payoff, p.r, grid));
    return finish_1d(grid, std::move(evolved), cfg, spots);
}

PricingResult price_mg_vanilla(const GridSpec& grid, const MGParams& p, double V0,
                               const PayoffSpec& payoff, const EvolutionConfig& cfg,
                               const std::vector<double>& spots) {
    p.validate();
    if (!grid.is_2d()) throw ParameterError("price_mg_vanilla: 2D grid required");
    payoff.validate(grid);
    if (!(V0 > 0.0)) throw ParameterError("price_mg_vanilla: V0 must be > 0");
    const double y0 = std::log(V0);
    if (y0 < grid.y_min || y0 > grid.y_max)
        throw ParameterError("price_mg_vanilla: ln(V0) outside the y grid");
    const OperatorMatrix H = build_mg_hamiltonian(grid, p, YEdgePolicy::outflow);
    ValueField terminal = sample_x(grid, [&](double x) { return payoff.value(x); }, "payoff");
    ValueField evolved = evolve(H, terminal, cfg, payoff_boundaries(payoff, p.r, grid));

    PricingResult res;
    res.diagnostics.scheme = to_string(cfg.scheme);
    res.diagnostics.steps = cfg.n_steps;
    res.diagnostics.grid = grid;
    for (double s : spots) {
        if (!(s > 0.0)) throw ParameterError("price query: spot must be > 0");
        res.price_at.emplace_back(s, interpolate_2d(grid, evolved, std::log(s), y0));
    }
    res.field = std::move(evolved);
    return res;
}

PricingResult price_down_and_out(const GridSpec& grid, const BSParams& p, double barrier,
                                 const PayoffSpec& payoff, const EvolutionConfig& cfg,
                                 const std::vector<double>& spots) {
    p.validate();
    payoff.validate(grid);
    if (!(barrier > 0.0)) throw ParameterError("price_down_and_out: barrier must be > 0");
    if (payoff.kind != PayoffKind::custom_table && barrier >= payoff.strike)
        throw ParameterError("price_down_and_out: requires barrier < strike");
    const double x_b = std::log(barrier);
    if (x_b >= grid.x_max) throw ParameterError("price_down_and_out: barrier outside grid");
    if (x_b <= grid.x_min) {
        // barrier never active
        return price_bs_vanilla(grid, p, payoff, cfg, spots);
    }

    const GridSpec sub = GridSpec::make_1d(x_b, grid.x_max, grid.n_x);
    const OperatorMatrix H = build_bs_hamiltonian(sub, p);
    ValueField terminal = sample_x(sub, [&](double x) { return payoff.value(x); }, "payoff");
    terminal[0] = 0.0;
    BoundaryValues b = payoff_boundaries(payoff, p.r, sub);
    b.left = [](double) { return 0.0; };
    ValueField evolved = evolve(H, terminal, cfg, b);

    PricingResult res;
    res.diagnostics.scheme = to_string(cfg.scheme);
    res.diagnostics.steps = cfg.n_steps;
    res.diagnostics.grid = sub;
    for (double s : spots) {
        if (!(s > 0.0)) throw ParameterError("price query: spot must be > 0");
        const double price = s <= barrier ? 0.0 : interpolate_1d(sub, evolved, std::log(s));
        res.price_at.emplace_back(s, price);
    }
    res.field = std::move(evolved);
    return res;
}

PricingResult price_double_knock_out(const GridSpec& grid, const BSParams& p, double barrier_lo,
                                     double barrier_hi, const PayoffSpec& payoff,
                                     const EvolutionConfig& cfg, const std::vector<double>& spots) {
    p.validate();
    payoff.validate(grid);
    if (!(barrier_lo >= 0.0) || !(barrier_hi > 0.0) || !(barrier_lo < barrier_hi))
        throw ParameterError("price_double_knock_out: requires 0 <= B_lo < B_hi");
    const double x_lo_raw = barrier_lo > 0.0 ? std::log(barrier_lo) : -1e300;
    const double x_hi_raw = std::log(barrier_hi);
    const bool lo_active = x_lo_raw > grid.x_min;
    const bool hi_active = x_hi_raw < grid.x_max;
    if (lo_active && x_lo_raw >= grid.x_max)
        throw ParameterError("price_double_knock_out: lower barrier outside grid");
    if (hi_active && x_hi_raw <= grid.x_min)
        throw ParameterError("price_double_knock_out: upper barrier outside grid");

    const double x_lo = lo_active ? x_lo_raw : grid.x_min;
    const double x_hi = hi_active ? x_hi_raw : grid.x_max;
    const GridSpec sub = GridSpec::make_1d(x_lo, x_hi, grid.n_x);
    const OperatorMatrix H = build_bs_hamiltonian(sub, p);
    ValueField terminal = sample_x(sub, [&](double x) { return payoff.value(x); }, "payoff");
    BoundaryValues b = payoff_boundaries(payoff, p.r, sub);
    if (lo_active) {
        terminal[0] = 0.0;
        b.left = [](double) { return 0.0; };
    }
    if (hi_active) {
        terminal[sub.n_x - 1] = 0.0;
        b.right = [](double) { return 0.0; };
    }
    ValueField evolved = evolve(H, terminal, cfg, b);

    PricingResult res;
    res.diagnostics.scheme = to_string(cfg.scheme);
    res.diagnostics.steps = cfg.n_steps;
    res.diagnostics.grid = sub;
    for (double s : spots) {
        if (!(s > 0.0)) throw ParameterError("price query: spot must be > 0");
        double price = 0.0;
        if ((!lo_active || s > barrier_lo) && (!hi_active || s < barrier_hi))
            price = interpolate_1d(sub, evolved, std::log(s));
        res.price_at.emplace_back(s, price);
    }
    res.field = std::move(evolved);
    return res;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bs_closed_form(double S0, double K, double r, double sigma, double T, PayoffKind kind) {
    if (!(S0 > 0.0) || !(K > 0.0) || !(T > 0.0) || sigma < 0.0)
        throw ParameterError("bs_closed_form: requires S0, K, T > 0 and sigma >= 0");
    if (kind == PayoffKind::custom_table)
        throw ParameterError("bs_closed_form: call/put only");
    const double df = std::exp(-r * T);
    const double vol = sigma * std::sqrt(T);
    if (vol < 1e-12) {
        const double fwd = S0 / df;
        const double intrinsic = kind == PayoffKind::call ? std::max(fwd - K, 0.0) : std::max(K - fwd, 0.0);
        return df * intrinsic;
    }
    const double d1 = (std::log(S0 / K) + (r + 0.5 * sigma * sigma) * T) / vol;
    const double d2 = d1 - vol;
    if (kind == PayoffKind::call) return S0 * norm_cdf(d1) - K * df * norm_cdf(d2);
    return K * df * norm_cdf(-d2) - S0 * norm_cdf(-d1);
}

GridSpec default_pricing_grid(double S0, double sigma, double T, std::size_t n) {
    if (!(S0 > 0.0)) throw ParameterError("default_pricing_grid: S0 must be > 0");
    const double half_width = std::max(8.0 * sigma * std::sqrt(T), 1e-3);
    return GridSpec::make_1d(std::log(S0) - half_width, std::log(S0) + half_width, n);
}

} // namespace hamfin
