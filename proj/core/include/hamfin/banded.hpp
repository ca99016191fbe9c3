#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "hamfin/grid.hpp"

namespace hamfin {

/**
 * Banded real matrix stored by diagonals: for each stored offset d,
 * entry(r, r+d) = diag_d[r]. Entries outside the stored diagonals are
 * exactly zero. 1D operators keep a small fixed offset set (tridiagonal
 * interior plus one-sided edge rows); 2D operators couple neighbouring
 * x-blocks, so offsets reach a few multiples of n_y.
 *
 * boundary_width flags how many cells per edge are contaminated by the
 * one-sided boundary stencils; interior-restricted diagnostics
 * (residual norms, the Hermiticity defect) skip them.
 */
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(GridSpec grid, std::size_t boundary_width,
                   std::vector<long> offsets, std::vector<std::vector<double>> diags);

    std::size_t size() const { return n_; }
    const GridSpec& grid() const { return grid_; }
    std::size_t boundary_width() const { return boundary_width_; }

    /// Largest |offset| with stored entries.
    long bandwidth() const;

    const std::vector<long>& offsets() const { return offsets_; }
    const std::vector<double>& diagonal(std::size_t k) const { return diags_[k]; }

    /// Entry A[r][c]; zero off the stored diagonals.
    double entry(std::size_t r, std::size_t c) const;

    /// Banded matrix-vector product.
    ValueField apply(const ValueField& f) const;

    /// True when every grid coordinate of flat node r is at least
    /// boundary_width cells away from every edge.
    bool is_interior(std::size_t r) const;

    /// True when no first-derivative (antisymmetric) contribution was
    /// assembled anywhere on the grid.
    bool drift_free() const { return drift_free_; }
    void set_drift_free(bool v) { drift_free_ = v; }

private:
    std::size_t n_ = 0;
    GridSpec grid_;
    std::size_t boundary_width_ = 2;
    std::vector<long> offsets_;                // sorted ascending
    std::vector<std::vector<double>> diags_;   // diags_[k][r] = A[r][r+offsets_[k]]
    bool drift_free_ = false;
};

/// Accumulates (row, col, value) triples into diagonal storage.
class BandedBuilder {
public:
    explicit BandedBuilder(GridSpec grid, std::size_t boundary_width = 2);

    void add(std::size_t r, std::size_t c, double v);

    OperatorMatrix freeze(bool drift_free = false);

private:
    GridSpec grid_;
    std::size_t n_;
    std::size_t boundary_width_;
    std::map<long, std::vector<double>> diags_;
};

/**
 * Banded LU factorization with partial pivoting (row-anchored band
 * storage, fill width kl extra superdiagonals). Factor once, solve many.
 */
class BandedLU {
public:
    /// rows[r] lists the (col, value) entries of row r; all |col-r| <= band.
    BandedLU(std::size_t n, long band,
             const std::vector<std::vector<std::pair<std::size_t, double>>>& rows);

    /// Solves A x = b in place. Throws NumericalError on zero pivot.
    void solve(std::vector<double>& b) const;

    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    long kl_ = 0;  // == ku_
    long width_ = 0;
    std::vector<double> w_;       // n_ x width_, row-anchored: W(i, j-i+kl)
    std::vector<std::size_t> piv_;

    double& at(std::size_t i, long slot) { return w_[i * std::size_t(width_) + std::size_t(slot)]; }
    double at(std::size_t i, long slot) const { return w_[i * std::size_t(width_) + std::size_t(slot)]; }
    void factor();
};

} // namespace hamfin
