#pragma once

#include <functional>

#include "hamfin/banded.hpp"
#include "hamfin/grid.hpp"
#include "hamfin/params.hpp"

namespace hamfin {

/// How rows on the log-variance edges are discretized.
enum class YEdgePolicy {
    one_sided,  // one-sided second-order stencils for every term
    outflow     // one-sided first derivative, zero second y-derivative
};

/**
 * Discretized Black-Scholes Hamiltonian on a 1D log-price grid:
 *   H = -(sigma^2/2) d2/dx2 + (sigma^2/2 - r) d/dx + r.
 * Interior rows are second-order central; the two edge rows use
 * one-sided second-order stencils.
 */
OperatorMatrix build_bs_hamiltonian(const GridSpec& grid, const BSParams& p);

/**
 * Discretized Merton-Garman Hamiltonian on a 2D (x, y) grid, all six
 * terms with y-dependent coefficients evaluated at each grid row and a
 * four-point cross stencil for the mixed derivative.
 */
OperatorMatrix build_mg_hamiltonian(const GridSpec& grid, const MGParams& p,
                                    YEdgePolicy policy = YEdgePolicy::one_sided);

/**
 * Merton-Garman x-sector at a fixed log-variance y (all d/dy terms
 * dropped): row-wise this is the BS Hamiltonian with sigma^2 = e^y.
 */
OperatorMatrix build_mg_fixed_y_hamiltonian(const GridSpec& grid, const MGParams& p, double y);

/**
 * Relative Hermiticity defect ||H - H^T||_F / max(1, ||H||_F) under the
 * plain grid inner product, restricted to entry pairs whose row and
 * column both lie boundary_width cells away from the edges (the
 * one-sided edge rows are never symmetric, for any coefficients).
 */
double hermiticity_defect(const OperatorMatrix& H);

/// Banded matrix-vector product (free-function form).
ValueField apply(const OperatorMatrix& H, const ValueField& f);

namespace detail {

/// Assemble c2(x)*d2/dx2 + c1(x)*d/dx + c0(x) on a 1D grid.
OperatorMatrix assemble_1d(const GridSpec& grid,
                           const std::function<double(double)>& c2,
                           const std::function<double(double)>& c1,
                           const std::function<double(double)>& c0);

/// First/second derivative stencil at position i on an axis of n nodes;
/// writes (offset, weight) pairs and returns the count. Buffers hold >= 4.
int d1_stencil(std::size_t i, std::size_t n, double h, long* offs, double* w);
int d2_stencil(std::size_t i, std::size_t n, double h, long* offs, double* w);

} // namespace detail

} // namespace hamfin
