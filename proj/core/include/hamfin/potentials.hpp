#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hamfin/banded.hpp"
#include "hamfin/grid.hpp"

namespace hamfin {

/**
 * A potential term for the effective Hamiltonians: a constant, a tabulated
 * V(x) (sorted, linearly interpolated, must cover the grid), or the quartic
 * field potential V(S) = -mu2 S^2 + omega S^4 used for the
 * symmetry-breaking analysis.
 */
struct PotentialSpec {
    enum class Kind { constant, table, quartic };

    Kind kind = Kind::constant;
    double value = 0.0;                              // constant
    std::vector<std::pair<double, double>> table;    // (x, V(x)), sorted by x
    double mu2 = 0.0;                                // quartic
    double omega = 0.0;

    static PotentialSpec constant(double v);
    static PotentialSpec from_table(std::vector<std::pair<double, double>> t);
    static PotentialSpec quartic(double mu2, double omega);

    /// V at log-price x (constant / table kinds).
    double eval(double x) const;

    /// Quartic potential evaluated on a field value S.
    double eval_field(double s) const;

    /// Throws ParameterError when a table does not cover [x_min, x_max].
    void require_covers(const GridSpec& grid) const;
};

/// Load a two-column (x, V) CSV with a header row.
PotentialSpec load_potential_csv(const std::string& path);

/**
 * Effective BS Hamiltonian with a potential replacing the constant rate:
 *   H = -(sigma^2/2) d2/dx2 + (sigma^2/2 - V(x)) d/dx + V(x),
 * the same pointwise V in the drift and the zeroth-order term. Applied to
 * the discretized e^x the two V terms cancel, so the martingale state is
 * annihilated for any potential.
 */
OperatorMatrix build_effective_bs(const GridSpec& grid, double sigma, const PotentialSpec& V);

/**
 * Similarity-transform Hermitization of the effective BS Hamiltonian.
 *
 * H_herm = -(sigma^2/2) d2/dx2 + (1/2)V'(x) + (1/(2 sigma^2))(V + sigma^2/2)^2
 * with V' by central differences, assembled as a symmetric matrix
 * (central second-difference rows throughout, out-of-range neighbours
 * dropped). s(x) = x/2 - (1/sigma^2) * integral_0^x V, by trapezoid on the
 * grid. similarity_residual compares diag(e^s) H_herm diag(e^-s) against
 * build_effective_bs in the Frobenius norm over interior rows.
 *
 * For a constant potential, alpha = (sigma^2/2 - V)/sigma^2 and
 * gamma = (V + sigma^2/2)^2 / (2 sigma^2) are filled; NaN otherwise.
 */
struct HermitizationResult {
    OperatorMatrix H_herm;
    ValueField s_field;
    double alpha = 0.0;
    double gamma = 0.0;
    double similarity_residual = 0.0;
};

HermitizationResult hermitize(const GridSpec& grid, double sigma, const PotentialSpec& V);

/// Largest |Im(lambda)| / max(1, |lambda|) over the dense spectrum; the
/// dense solve limits this to n <= 512.
double max_relative_imag_eigenvalue(const OperatorMatrix& H);

/**
 * Degenerate minima of the quartic potential: stationarity of
 * -mu2 S^2 + omega S^4 fixes |S| = sqrt(mu2 / (2 omega)) but not the sign.
 */
struct VacuumManifold {
    double magnitude = 0.0;
    std::vector<double> representatives;  // {+magnitude, -magnitude}
    std::string multiplicity_note;
};

VacuumManifold quartic_vacuum(const PotentialSpec& q);

/**
 * Kinetic-vs-potential weight of H_base on test fields whose values stay
 * within `window` of the vacuum magnitude: a constant field at the vacuum
 * value, and a Gaussian bump of width `window` in x. Small ratios certify
 * the regime where the derivative terms are negligible.
 */
struct FlatnessReport {
    double window = 0.0;
    double ratio_constant = 0.0;  // |H f| / |V(f)| for f == magnitude
    double ratio_bump = 0.0;      // same for the bump field
    double kinetic_l2_bump = 0.0;
    double potential_l2_bump = 0.0;
};

FlatnessReport quartic_flatness_report(const PotentialSpec& q, const OperatorMatrix& H_base,
                                       double window);

} // namespace hamfin
