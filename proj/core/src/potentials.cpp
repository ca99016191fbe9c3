#include "hamfin/potentials.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>

#include "hamfin/errors.hpp"
#include "hamfin/operators.hpp"

namespace hamfin {

PotentialSpec PotentialSpec::constant(double v) {
    if (!std::isfinite(v)) throw ParameterError("PotentialSpec: non-finite constant");
    PotentialSpec p;
    p.kind = Kind::constant;
    p.value = v;
    return p;
}

PotentialSpec PotentialSpec::from_table(std::vector<std::pair<double, double>> t) {
    if (t.size() < 2) throw ParameterError("PotentialSpec: table needs at least 2 rows");
    for (auto& [x, v] : t)
        if (!std::isfinite(x) || !std::isfinite(v))
            throw ParameterError("PotentialSpec: non-finite table entry");
    if (!std::is_sorted(t.begin(), t.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw ParameterError("PotentialSpec: table must be sorted by x");
    PotentialSpec p;
    p.kind = Kind::table;
    p.table = std::move(t);
    return p;
}

PotentialSpec PotentialSpec::quartic(double mu2, double omega) {
    if (!(mu2 > 0.0) || !(omega > 0.0))
        throw ParameterError("PotentialSpec: quartic coefficients must be > 0");
    PotentialSpec p;
    p.kind = Kind::quartic;
    p.mu2 = mu2;
    p.omega = omega;
    return p;
}

double PotentialSpec::eval(double x) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::table: {
            if (x < table.front().first || x > table.back().first)
                throw ParameterError("PotentialSpec: x outside table range");
            auto it = std::lower_bound(table.begin(), table.end(), x,
                                       [](const auto& row, double q) { return row.first < q; });
            if (it == table.begin()) return it->second;
            const auto& [x1, v1] = *it;
            const auto& [x0, v0] = *(it - 1);
            const double t = (x - x0) / (x1 - x0);
            return v0 + t * (v1 - v0);
        }
        case Kind::quartic:
            throw ParameterError("PotentialSpec: quartic potential acts on field values, not x");
    }
    return 0.0;
}

double PotentialSpec::eval_field(double s) const {
    if (kind != Kind::quartic) throw ParameterError("eval_field: quartic kind only");
    const double s2 = s * s;
    return -mu2 * s2 + omega * s2 * s2;
}

void PotentialSpec::require_covers(const GridSpec& grid) const {
    if (kind != Kind::table) return;
    if (table.front().first > grid.x_min || table.back().first < grid.x_max)
        throw ParameterError("PotentialSpec: table does not cover the grid range");
}

PotentialSpec load_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open potential table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParameterError("empty potential table: " + path);
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ParameterError("malformed potential table row: " + line);
        rows.emplace_back(std::stod(a), std::stod(b));
    }
    return PotentialSpec::from_table(std::move(rows));
}

OperatorMatrix build_effective_bs(const GridSpec& grid, double sigma, const PotentialSpec& V) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ParameterError("build_effective_bs: sigma must be finite and > 0");
    if (V.kind == PotentialSpec::Kind::quartic)
        throw ParameterError("build_effective_bs: quartic potentials act on field values");
    V.require_covers(grid);
    const double half_sig2 = 0.5 * sigma * sigma;
    return detail::assemble_1d(
        grid, [&](double) { return -half_sig2; }, [&](double x) { return half_sig2 - V.eval(x); },
        [&](double x) { return V.eval(x); });
}

namespace {

// cumulative trapezoid of node samples, anchored so the integral vanishes
// at x = 0 when 0 lies inside the grid (else at x_min)
std::vector<double> integral_from_zero(const GridSpec& g, const std::vector<double>& v) {
    const std::size_t n = g.n_x;
    const double h = g.h_x();
    std::vector<double> F(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    double F0 = 0.0;
    if (g.x_min <= 0.0 && g.x_max >= 0.0) {
        const double t = (0.0 - g.x_min) / h;
        const std::size_t i0 = std::min(std::size_t(t), n - 2);
        const double frac = t - double(i0);
        F0 = F[i0] + frac * (F[i0 + 1] - F[i0]);
    }
    for (double& f : F) f -= F0;
    return F;
}

} // namespace

HermitizationResult hermitize(const GridSpec& grid, double sigma, const PotentialSpec& V) {
    if (grid.is_2d()) throw ParameterError("hermitize: 1D grids only");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ParameterError("hermitize: sigma must be finite and > 0");
    if (V.kind == PotentialSpec::Kind::quartic)
        throw ParameterError("hermitize: quartic potentials act on field values");
    V.require_covers(grid);

    const std::size_t n = grid.n_x;
    const double h = grid.h_x();
    const double sig2 = sigma * sigma;

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = V.eval(grid.x(i));

    // V' by central differences (one-sided second order at the edges)
    std::vector<double> vp(n);
    vp[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    vp[n - 1] = (v[n - 3] - 4.0 * v[n - 2] + 3.0 * v[n - 1]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) vp[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);

    // symmetric realization of -(sig2/2) d2/dx2 + W(x)
    BandedBuilder b(grid);
    const double off = -0.5 * sig2 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * vp[i] + (v[i] + 0.5 * sig2) * (v[i] + 0.5 * sig2) / (2.0 * sig2);
        b.add(i, i, sig2 / (h * h) + w);
        if (i > 0) b.add(i, i - 1, off);
        if (i + 1 < n) b.add(i, i + 1, off);
    }

    HermitizationResult res;
    res.H_herm = b.freeze(true);

    const std::vector<double> F = integral_from_zero(grid, v);
    res.s_field.label = "s(x)";
    res.s_field.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 0.5 * grid.x(i) - F[i] / sig2;
        if (std::abs(s) > 700.0)
            throw RangeError("hermitize: e^{+-s} overflows; use a narrower grid");
        res.s_field.values[i] = s;
    }

    if (V.kind == PotentialSpec::Kind::constant) {
        res.alpha = (0.5 * sig2 - V.value) / sig2;
        res.gamma = (V.value + 0.5 * sig2) * (V.value + 0.5 * sig2) / (2.0 * sig2);
    } else {
        res.alpha = std::numeric_limits<double>::quiet_NaN();
        res.gamma = std::numeric_limits<double>::quiet_NaN();
    }

    // || e^s H_herm e^{-s} - H_eff ||_F / ||H_eff||_F over interior rows
    const OperatorMatrix H_eff = build_effective_bs(grid, sigma, V);
    double num2 = 0.0, den2 = 0.0;
    const auto& s = res.s_field.values;
    auto accumulate_row = [&](std::size_t r) {
        for (long d = -3; d <= 3; ++d) {
            const long c = long(r) + d;
            if (c < 0 || c >= long(n)) continue;
            const double conj =
                std::exp(s[r] - s[std::size_t(c)]) * res.H_herm.entry(r, std::size_t(c));
            const double eff = H_eff.entry(r, std::size_t(c));
            num2 += (conj - eff) * (conj - eff);
            den2 += eff * eff;
        }
    };
    for (std::size_t r = 0; r < n; ++r)
        if (H_eff.is_interior(r)) accumulate_row(r);
    res.similarity_residual = std::sqrt(num2) / std::sqrt(den2);
    return res;
}

double max_relative_imag_eigenvalue(const OperatorMatrix& H) {
    const std::size_t n = H.size();
    if (n > 512) throw ParameterError("max_relative_imag_eigenvalue: dense path limited to n <= 512");
    Eigen::MatrixXd A(n, n);
    A.setZero();
    for (std::size_t k = 0; k < H.offsets().size(); ++k) {
        const long d = H.offsets()[k];
        const auto& diag = H.diagonal(k);
        const std::size_t r0 = d < 0 ? std::size_t(-d) : 0;
        const std::size_t r1 = d > 0 ? n - std::size_t(d) : n;
        for (std::size_t r = r0; r < r1; ++r) A(long(r), long(r) + d) = diag[r];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    double worst = 0.0;
    for (long i = 0; i < long(n); ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        worst = std::max(worst, std::abs(ev.imag()) / std::max(1.0, std::abs(ev)));
    }
    return worst;
}

VacuumManifold quartic_vacuum(const PotentialSpec& q) {
    if (q.kind != PotentialSpec::Kind::quartic)
        throw ParameterError("quartic_vacuum: quartic kind required");
    VacuumManifold m;
    m.magnitude = std::sqrt(q.mu2 / (2.0 * q.omega));
    m.representatives = {m.magnitude, -m.magnitude};
    m.multiplicity_note =
        "stationarity fixes only |S|; the direction of the field is arbitrary, "
        "so every state with this magnitude is an equivalent equilibrium";
    return m;
}

FlatnessReport quartic_flatness_report(const PotentialSpec& q, const OperatorMatrix& H_base,
                                       double window) {
    if (!(window > 0.0)) throw ParameterError("quartic_flatness_report: window must be > 0");
    const VacuumManifold m = quartic_vacuum(q);
    const GridSpec& g = H_base.grid();
    if (g.is_2d()) throw ParameterError("quartic_flatness_report: 1D base operators only");

    auto interior_l2 = [&](const ValueField& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (H_base.is_interior(i)) s += f[i] * f[i];
        return std::sqrt(s);
    };
    auto potential_of = [&](const ValueField& f) {
        ValueField out;
        out.values.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = q.eval_field(f[i]);
        return out;
    };

    FlatnessReport rep;
    rep.window = window;

    ValueField f_const = sample_x(g, [&](double) { return m.magnitude; }, "vacuum constant");
    rep.ratio_constant =
        interior_l2(H_base.apply(f_const)) / interior_l2(potential_of(f_const));

    const double x_mid = 0.5 * (g.x_min + g.x_max);
    ValueField f_bump = sample_x(
        g,
        [&](double x) {
            const double t = (x - x_mid) / window;
            return m.magnitude * std::exp(-0.5 * t * t);
        },
        "vacuum bump");
    rep.kinetic_l2_bump = interior_l2(H_base.apply(f_bump));
    rep.potential_l2_bump = interior_l2(potential_of(f_bump));
    rep.ratio_bump = rep.kinetic_l2_bump / rep.potential_l2_bump;
    return rep;
}

} // namespace hamfin
