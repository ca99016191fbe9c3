#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamfin/banded.hpp"
#include "hamfin/grid.hpp"
#include "hamfin/params.hpp"

namespace hamfin {

enum class PayoffKind { call, put, custom_table };

/// Terminal payoff g(x) in log-price coordinates.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::call;
    double strike = 0.0;
    std::vector<std::pair<double, double>> table;  // (x, value), sorted

    static PayoffSpec call(double K);
    static PayoffSpec put(double K);
    static PayoffSpec custom(std::vector<std::pair<double, double>> t);

    double value(double x) const;

    /// Payoff at a raw price S (tolerates S == 0 for call/put).
    double value_from_price(double S) const;

    void validate(const GridSpec& grid) const;
};

enum class Scheme { crank_nicolson, implicit_euler };

const char* to_string(Scheme s);

/// Time discretization of the evolution e^{-T H}. Crank-Nicolson runs the
/// first four steps as implicit Euler to damp payoff-kink oscillations.
struct EvolutionConfig {
    double T = 0.0;
    std::size_t n_steps = 0;
    Scheme scheme = Scheme::crank_nicolson;

    void validate() const;
};

/// Dirichlet values held on the two x-edges as functions of elapsed
/// evolution time tau (the same value across y rows on 2D grids).
struct BoundaryValues {
    std::function<double(double)> left;
    std::function<double(double)> right;
};

/// Payoff-asymptotic boundary values: a call decays to 0 on the left and
/// to e^x - K e^{-r tau} on the right; a put mirrors this; custom payoffs
/// hold their terminal edge values.
BoundaryValues payoff_boundaries(const PayoffSpec& payoff, double r, const GridSpec& grid);

/**
 * Propagate dC/dtau = -H C from the terminal field over cfg.T, i.e. the
 * discretized action of e^{-T H}. Each step solves the banded linear
 * system of the scheme; x-edge rows are replaced by Dirichlet rows with
 * the supplied boundary values.
 */
ValueField evolve(const OperatorMatrix& H, const ValueField& terminal, const EvolutionConfig& cfg,
                  const BoundaryValues& boundary);

/// evolve() holding the edges at their terminal values.
ValueField evolve(const OperatorMatrix& H, const ValueField& terminal, const EvolutionConfig& cfg);

struct PricingDiagnostics {
    std::string scheme;
    std::size_t steps = 0;
    GridSpec grid;
    std::optional<double> residual_order;
};

struct PricingResult {
    ValueField field;  // C(t=0, .)
    std::vector<std::pair<double, double>> price_at;  // (spot S, price)
    PricingDiagnostics diagnostics;
};

/// Linear interpolation of a 1D field at log-price x.
double interpolate_1d(const GridSpec& grid, const ValueField& f, double x);

/// Bilinear interpolation of a 2D field at (x, y).
double interpolate_2d(const GridSpec& grid, const ValueField& f, double x, double y);

PricingResult price_bs_vanilla(const GridSpec& grid, const BSParams& p, const PayoffSpec& payoff,
                               const EvolutionConfig& cfg, const std::vector<double>& spots);

/// Merton-Garman pricing on the 2D grid (y edges use outflow rows);
/// prices are read at log-variance ln(V0).
PricingResult price_mg_vanilla(const GridSpec& grid, const MGParams& p, double V0,
                               const PayoffSpec& payoff, const EvolutionConfig& cfg,
                               const std::vector<double>& spots);

/**
 * Down-and-Out barrier: the domain is cut at x_B = ln(B) and a Dirichlet
 * zero is enforced there every step (the infinite-barrier realization);
 * the value for S <= B is 0. A barrier below the grid is never active and
 * reproduces the vanilla price.
 */
PricingResult price_down_and_out(const GridSpec& grid, const BSParams& p, double barrier,
                                 const PayoffSpec& payoff, const EvolutionConfig& cfg,
                                 const std::vector<double>& spots);

/// Double-Knock-Out: Dirichlet zero at both barriers.
PricingResult price_double_knock_out(const GridSpec& grid, const BSParams& p, double barrier_lo,
                                     double barrier_hi, const PayoffSpec& payoff,
                                     const EvolutionConfig& cfg, const std::vector<double>& spots);

/// Standard lognormal closed form for European calls/puts (sigma -> 0
/// degenerates to the discounted forward intrinsic value).
double bs_closed_form(double S0, double K, double r, double sigma, double T,
                      PayoffKind kind = PayoffKind::call);

/// Standard normal CDF.
double norm_cdf(double x);

/// Default pricing grid: ln(S0) +- 8 sigma sqrt(T).
GridSpec default_pricing_grid(double S0, double sigma, double T, std::size_t n);

} // namespace hamfin
