#include "hamfin/martingale.hpp"

#include <cmath>
#include <limits>

#include "hamfin/errors.hpp"
#include "hamfin/operators.hpp"

namespace hamfin {

MartingaleReport martingale_residual(const OperatorMatrix& H, const ValueField& state) {
    const ValueField r = H.apply(state);
    double res_max = 0.0, state_max = 0.0;
    double res_l2 = 0.0, state_l2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!H.is_interior(i)) continue;
        const double a = std::abs(r[i]);
        const double s = std::abs(state[i]);
        res_max = std::max(res_max, a);
        state_max = std::max(state_max, s);
        res_l2 += a * a;
        state_l2 += s * s;
        ++count;
    }
    if (count == 0 || state_max == 0.0)
        throw ParameterError("martingale_residual: empty interior or zero state");
    MartingaleReport rep;
    rep.state_label = state.label;
    rep.interior_residual_max = res_max / state_max;
    rep.interior_residual_l2 = std::sqrt(res_l2) / std::sqrt(state_l2);
    return rep;
}

double estimate_order(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 3)
        throw ParameterError("estimate_order: needs at least 3 refinement levels");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [h, res] : pts) {
        if (!(h > 0.0) || !(res > 0.0))
            throw ParameterError("estimate_order: h and residual must be positive");
        const double lx = std::log(h), ly = std::log(res);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = double(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double extended_constraint_residual(const MGParams& p, double y) {
    return p.lambda +
           std::exp(y) * (p.mu + 0.5 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0)) +
                          p.rho * p.zeta * std::exp(y * (p.alpha - 0.5)));
}

const char* to_string(SignConvention c) {
    return c == SignConvention::closed_form ? "closed-form" : "stationary-point";
}

VacuumFields bs_vacuum_field(const BSParams& p, SignConvention conv) {
    p.validate();
    const double v = p.r / (p.sigma * p.sigma) - 0.5;
    VacuumFields f;
    f.convention = conv;
    f.phi_x_vac = conv == SignConvention::closed_form ? v : -v;
    return f;
}

VacuumFields mg_vacuum_field(const MGParams& p, double y, SignConvention conv) {
    p.validate();
    const double v = p.r * std::exp(-y) - 0.5;
    VacuumFields f;
    f.convention = conv;
    f.phi_x_vac = conv == SignConvention::closed_form ? v : -v;
    return f;
}

std::pair<double, double> mg_vacuum_system_residuals(const MGParams& p, double y, double phi_x,
                                                     double phi_y) {
    const double ey = std::exp(y);
    const double cross = p.rho * p.zeta * std::exp(y * (p.alpha - 0.5));
    const double e2 = p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0));
    const double r1 = ey * phi_x + (p.r - ey / 2.0) + cross * phi_y;
    const double r2 = p.lambda * std::exp(-y) + p.mu - 0.5 * e2 + cross * phi_x + 2.0 * e2 * phi_y;
    return {r1, r2};
}

VacuumFields solve_mg_vacuum_system(const MGParams& p, double y) {
    p.validate();
    if (p.zeta == 0.0)
        throw DegenerateSystemError(
            "solve_mg_vacuum_system: zeta = 0 makes the 2x2 system singular; "
            "use mg_vacuum_field for the one-field value");
    const double ey = std::exp(y);
    const double a11 = ey;
    const double a12 = p.rho * p.zeta * std::exp(y * (p.alpha - 0.5));
    const double a21 = a12;
    const double a22 = 2.0 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0));
    const double b1 = ey / 2.0 - p.r;
    const double b2 = 0.5 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0)) -
                      p.lambda * std::exp(-y) - p.mu;
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det))
        throw DegenerateSystemError("solve_mg_vacuum_system: singular vacuum system");
    VacuumFields f;
    f.convention = SignConvention::stationary_point;
    f.phi_x_vac = (b1 * a22 - a12 * b2) / det;
    f.phi_y_vac = (a11 * b2 - b1 * a21) / det;
    return f;
}

const char* to_string(DegeneracyReason r) {
    switch (r) {
        case DegeneracyReason::drift_nonzero: return "drift-nonzero";
        case DegeneracyReason::rho_nonzero: return "rho-nonzero";
        case DegeneracyReason::zeta_nonzero: return "zeta-nonzero";
        case DegeneracyReason::constraint_violated: return "constraint-violated";
    }
    return "?";
}

DegeneracyClass classify_degeneracy(const BSParams& p, double tol) {
    p.validate();
    DegeneracyClass c;
    if (std::abs(p.r - 0.5 * p.sigma * p.sigma) > tol)
        c.reasons.push_back(DegeneracyReason::drift_nonzero);
    c.single = c.reasons.empty();
    return c;
}

DegeneracyClass classify_degeneracy(const MGParams& p, double y, bool extended, double tol) {
    p.validate();
    DegeneracyClass c;
    if (std::abs(p.r - 0.5 * std::exp(y)) > tol)
        c.reasons.push_back(DegeneracyReason::drift_nonzero);
    if (extended) {
        const double vol_drift = p.lambda * std::exp(-y) + p.mu -
                                 0.5 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0));
        if (std::abs(vol_drift) > tol)
            c.reasons.push_back(DegeneracyReason::constraint_violated);
        if (std::abs(p.rho) > tol) c.reasons.push_back(DegeneracyReason::rho_nonzero);
        if (p.zeta > tol) c.reasons.push_back(DegeneracyReason::zeta_nonzero);
    }
    c.single = c.reasons.empty();
    return c;
}

double momentum_action_check(const GridSpec& grid, const ValueField& state) {
    if (grid.is_2d()) throw ParameterError("momentum_action_check: 1D grids only");
    if (state.size() != grid.n_x) throw DimensionError("momentum_action_check: size mismatch");
    const double h = grid.h_x();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < grid.n_x; ++i) {
        const double s = state[i];
        if (!(s > 0.0)) throw ParameterError("momentum_action_check: state must be strictly positive");
        const double d = (state[i + 1] - state[i - 1]) / (2.0 * h);
        min_ratio = std::min(min_ratio, std::abs(d) / std::abs(s));
    }
    return min_ratio;
}

std::vector<SVacCheck> s_vac_powers(double phi_vac, int n_max, const GridSpec& grid) {
    std::vector<SVacCheck> out;
    const double s_min = std::exp(grid.x_min);
    const double s_max = std::exp(grid.x_max);
    double v = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        v *= phi_vac;
        SVacCheck c;
        c.n = n;
        c.value = v;
        c.on_grid = v >= s_min && v <= s_max;
        out.push_back(c);
    }
    return out;
}

} // namespace hamfin
