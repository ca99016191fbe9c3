#include "hamfin/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hamfin/errors.hpp"

namespace hamfin {

OperatorMatrix::OperatorMatrix(GridSpec grid, std::size_t boundary_width,
                               std::vector<long> offsets, std::vector<std::vector<double>> diags)
    : n_(grid.size()),
      grid_(grid),
      boundary_width_(boundary_width),
      offsets_(std::move(offsets)),
      diags_(std::move(diags)) {}

long OperatorMatrix::bandwidth() const {
    long b = 0;
    for (long d : offsets_) b = std::max(b, std::labs(d));
    return b;
}

double OperatorMatrix::entry(std::size_t r, std::size_t c) const {
    const long d = long(c) - long(r);
    auto it = std::lower_bound(offsets_.begin(), offsets_.end(), d);
    if (it == offsets_.end() || *it != d) return 0.0;
    return diags_[std::size_t(it - offsets_.begin())][r];
}

ValueField OperatorMatrix::apply(const ValueField& f) const {
    if (f.size() != n_)
        throw DimensionError("apply: field length " + std::to_string(f.size()) +
                             " does not match operator dimension " + std::to_string(n_));
    ValueField out;
    out.label = "H(" + f.label + ")";
    out.values.assign(n_, 0.0);
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
        const long d = offsets_[k];
        const std::size_t r0 = d < 0 ? std::size_t(-d) : 0;
        const std::size_t r1 = d > 0 ? n_ - std::size_t(d) : n_;
        const double* diag = diags_[k].data();
        const double* src = f.values.data();
        double* dst = out.values.data();
        for (std::size_t r = r0; r < r1; ++r) dst[r] += diag[r] * src[std::size_t(long(r) + d)];
    }
    return out;
}

bool OperatorMatrix::is_interior(std::size_t r) const {
    const std::size_t k = boundary_width_;
    if (!grid_.is_2d()) return r >= k && r + k < grid_.n_x;
    const std::size_t ix = r / grid_.n_y;
    const std::size_t iy = r % grid_.n_y;
    return ix >= k && ix + k < grid_.n_x && iy >= k && iy + k < grid_.n_y;
}

BandedBuilder::BandedBuilder(GridSpec grid, std::size_t boundary_width)
    : grid_(grid), n_(grid.size()), boundary_width_(boundary_width) {}

void BandedBuilder::add(std::size_t r, std::size_t c, double v) {
    if (r >= n_ || c >= n_) throw DimensionError("BandedBuilder::add: index out of range");
    const long d = long(c) - long(r);
    auto it = diags_.find(d);
    if (it == diags_.end()) it = diags_.emplace(d, std::vector<double>(n_, 0.0)).first;
    it->second[r] += v;
}

OperatorMatrix BandedBuilder::freeze(bool drift_free) {
    std::vector<long> offsets;
    std::vector<std::vector<double>> diags;
    offsets.reserve(diags_.size());
    diags.reserve(diags_.size());
    for (auto& [d, vals] : diags_) {
        offsets.push_back(d);
        diags.push_back(std::move(vals));
    }
    OperatorMatrix m(grid_, boundary_width_, std::move(offsets), std::move(diags));
    m.set_drift_free(drift_free);
    return m;
}

// ---------------------------------------------------------------------------
// Banded LU, partial pivoting. Row i stores columns [i-kl, i+2*kl] so that
// rows swapped up during elimination still fit (U acquires bandwidth 2*kl).
// ---------------------------------------------------------------------------

BandedLU::BandedLU(std::size_t n, long band,
                   const std::vector<std::vector<std::pair<std::size_t, double>>>& rows)
    : n_(n), kl_(band), width_(3 * band + 1) {
    if (rows.size() != n) throw DimensionError("BandedLU: row count mismatch");
    w_.assign(n_ * std::size_t(width_), 0.0);
    piv_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (auto [c, v] : rows[i]) {
            const long slot = long(c) - long(i) + kl_;
            if (slot < 0 || slot >= width_ - kl_)
                throw DimensionError("BandedLU: entry outside declared band");
            at(i, slot) += v;
        }
    }
    factor();
}

void BandedLU::factor() {
    const long n = long(n_);
    for (long k = 0; k < n; ++k) {
        const long last = std::min(k + kl_, n - 1);
        long p = k;
        double best = std::abs(at(std::size_t(k), k - k + kl_));
        for (long i = k + 1; i <= last; ++i) {
            const double a = std::abs(at(std::size_t(i), k - i + kl_));
            if (a > best) {
                best = a;
                p = i;
            }
        }
        if (best == 0.0) throw NumericalError("BandedLU: zero pivot at column " + std::to_string(k), k);
        piv_[std::size_t(k)] = std::size_t(p);
        const long jmax = std::min(k + 2 * kl_, n - 1);
        if (p != k) {
            for (long j = k; j <= jmax; ++j)
                std::swap(at(std::size_t(k), j - k + kl_), at(std::size_t(p), j - p + kl_));
        }
        const double pivot = at(std::size_t(k), kl_);
        for (long i = k + 1; i <= last; ++i) {
            const double m = at(std::size_t(i), k - i + kl_) / pivot;
            at(std::size_t(i), k - i + kl_) = m;
            if (m == 0.0) continue;
            for (long j = k + 1; j <= jmax; ++j)
                at(std::size_t(i), j - i + kl_) -= m * at(std::size_t(k), j - k + kl_);
        }
    }
}

void BandedLU::solve(std::vector<double>& b) const {
    if (b.size() != n_) throw DimensionError("BandedLU::solve: rhs length mismatch");
    const long n = long(n_);
    for (long k = 0; k < n; ++k) {
        const std::size_t p = piv_[std::size_t(k)];
        if (p != std::size_t(k)) std::swap(b[std::size_t(k)], b[p]);
        const double xk = b[std::size_t(k)];
        if (xk == 0.0) continue;
        const long last = std::min(k + kl_, n - 1);
        for (long i = k + 1; i <= last; ++i) b[std::size_t(i)] -= at(std::size_t(i), k - i + kl_) * xk;
    }
    for (long k = n - 1; k >= 0; --k) {
        double s = b[std::size_t(k)];
        const long jmax = std::min(k + 2 * kl_, n - 1);
        for (long j = k + 1; j <= jmax; ++j) s -= at(std::size_t(k), j - k + kl_) * b[std::size_t(j)];
        b[std::size_t(k)] = s / at(std::size_t(k), kl_);
    }
}

} // namespace hamfin
