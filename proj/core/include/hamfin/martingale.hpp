#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamfin/banded.hpp"
#include "hamfin/grid.hpp"
#include "hamfin/params.hpp"

namespace hamfin {

/**
 * Residual norms of H applied to a candidate annihilated state, taken
 * over interior nodes only and normalized by the state's norm on the
 * same nodes. refinement_order is filled by estimate_order() when at
 * least three grid levels are available.
 */
struct MartingaleReport {
    std::string state_label;
    double interior_residual_max = 0.0;
    double interior_residual_l2 = 0.0;
    std::optional<double> refinement_order;
    std::optional<double> constraint_residual;
};

MartingaleReport martingale_residual(const OperatorMatrix& H, const ValueField& state);

/// Least-squares slope of log(residual) against log(h); needs >= 3 levels.
double estimate_order(const std::vector<std::pair<double, double>>& h_and_residual);

/**
 * Left-hand side of the extended-martingale parameter constraint for the
 * state e^{x+y}:
 *   lambda + e^y (mu + (zeta^2/2) e^{2y(alpha-1)} + rho zeta e^{y(alpha-1/2)}).
 */
double extended_constraint_residual(const MGParams& p, double y);

/**
 * Sign convention for reported vacuum field values. The closed form
 * r/sigma^2 - 1/2 and the stationary point of the quadratic
 * -(sigma^2/2) phi^2 + (sigma^2/2 - r) phi agree in magnitude and differ
 * in sign; both are reported rather than silently picking one.
 */
enum class SignConvention { closed_form, stationary_point };

const char* to_string(SignConvention c);

struct VacuumFields {
    double phi_x_vac = 0.0;
    std::optional<double> phi_y_vac;
    SignConvention convention = SignConvention::closed_form;
};

/// BS vacuum field value: r/sigma^2 - 1/2 (closed_form) or its negative.
VacuumFields bs_vacuum_field(const BSParams& p, SignConvention conv = SignConvention::closed_form);

/// MG one-field vacuum at fixed y: r e^{-y} - 1/2 (closed_form) or its negative.
VacuumFields mg_vacuum_field(const MGParams& p, double y,
                             SignConvention conv = SignConvention::closed_form);

/**
 * Solve the coupled two-field vacuum system at fixed y by direct 2x2
 * elimination:
 *   e^y phi_x + (r - e^y/2) + rho zeta e^{y(alpha-1/2)} phi_y = 0
 *   lambda e^{-y} + mu - (zeta^2/2) e^{2y(alpha-1)}
 *       + rho zeta e^{y(alpha-1/2)} phi_x + 2 zeta^2 e^{2y(alpha-1)} phi_y = 0
 * Throws DegenerateSystemError when zeta == 0 (use mg_vacuum_field then).
 * The returned values are the stationary point of the quadratic form.
 */
VacuumFields solve_mg_vacuum_system(const MGParams& p, double y);

/// Residuals of the two vacuum equations at a candidate (phi_x, phi_y).
std::pair<double, double> mg_vacuum_system_residuals(const MGParams& p, double y,
                                                     double phi_x, double phi_y);

enum class DegeneracyReason { drift_nonzero, rho_nonzero, zeta_nonzero, constraint_violated };

const char* to_string(DegeneracyReason r);

struct DegeneracyClass {
    bool single = false;
    std::vector<DegeneracyReason> reasons;  // empty iff single
};

/// BS: single vacuum iff |r - sigma^2/2| <= tol.
DegeneracyClass classify_degeneracy(const BSParams& p, double tol = 1e-10);

/**
 * MG at fixed y. Non-extended: single iff |r - e^y/2| <= tol. Extended
 * additionally requires the volatility-sector drift to vanish
 * (|lambda e^{-y} + mu - (zeta^2/2) e^{2y(alpha-1)}| <= tol), |rho| <= tol
 * and zeta <= tol.
 */
DegeneracyClass classify_degeneracy(const MGParams& p, double y, bool extended,
                                    double tol = 1e-10);

/**
 * Smallest interior ratio |d(state)/dx| / |state|: bounded away from zero
 * certifies that price translations do not annihilate the state (broken
 * symmetry); near zero certifies annihilation.
 */
double momentum_action_check(const GridSpec& grid, const ValueField& state);

/// Informational check of S = phi_vac^n against the grid's price range.
struct SVacCheck {
    int n = 1;
    double value = 0.0;
    bool on_grid = false;
};

std::vector<SVacCheck> s_vac_powers(double phi_vac, int n_max, const GridSpec& grid);

} // namespace hamfin
