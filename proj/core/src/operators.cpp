#include "hamfin/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hamfin/errors.hpp"

namespace hamfin {

namespace detail {

int d1_stencil(std::size_t i, std::size_t n, double h, long* offs, double* w) {
    if (i == 0) {
        offs[0] = 0;  w[0] = -3.0 / (2.0 * h);
        offs[1] = 1;  w[1] =  4.0 / (2.0 * h);
        offs[2] = 2;  w[2] = -1.0 / (2.0 * h);
        return 3;
    }
    if (i == n - 1) {
        offs[0] = -2; w[0] =  1.0 / (2.0 * h);
        offs[1] = -1; w[1] = -4.0 / (2.0 * h);
        offs[2] = 0;  w[2] =  3.0 / (2.0 * h);
        return 3;
    }
    offs[0] = -1; w[0] = -1.0 / (2.0 * h);
    offs[1] = 1;  w[1] =  1.0 / (2.0 * h);
    return 2;
}

int d2_stencil(std::size_t i, std::size_t n, double h, long* offs, double* w) {
    const double h2 = h * h;
    if (i == 0) {
        offs[0] = 0; w[0] =  2.0 / h2;
        offs[1] = 1; w[1] = -5.0 / h2;
        offs[2] = 2; w[2] =  4.0 / h2;
        offs[3] = 3; w[3] = -1.0 / h2;
        return 4;
    }
    if (i == n - 1) {
        offs[0] = -3; w[0] = -1.0 / h2;
        offs[1] = -2; w[1] =  4.0 / h2;
        offs[2] = -1; w[2] = -5.0 / h2;
        offs[3] = 0;  w[3] =  2.0 / h2;
        return 4;
    }
    offs[0] = -1; w[0] =  1.0 / h2;
    offs[1] = 0;  w[1] = -2.0 / h2;
    offs[2] = 1;  w[2] =  1.0 / h2;
    return 3;
}

OperatorMatrix assemble_1d(const GridSpec& grid,
                           const std::function<double(double)>& c2,
                           const std::function<double(double)>& c1,
                           const std::function<double(double)>& c0) {
    if (grid.is_2d()) throw ParameterError("assemble_1d: grid must be 1D");
    if (grid.n_x < 4) throw ParameterError("assemble_1d: needs at least 4 nodes for edge stencils");
    const std::size_t n = grid.n_x;
    const double h = grid.h_x();

    BandedBuilder b(grid);
    long offs[4];
    double w[4];
    bool drift_free = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double a2 = c2(x);
        const double a1 = c1(x);
        const double a0 = c0(x);
        if (!std::isfinite(a2) || !std::isfinite(a1) || !std::isfinite(a0))
            throw ParameterError("assemble_1d: non-finite coefficient at x=" + std::to_string(x));
        if (a1 != 0.0) drift_free = false;
        int m = d2_stencil(i, n, h, offs, w);
        for (int k = 0; k < m; ++k) b.add(i, std::size_t(long(i) + offs[k]), a2 * w[k]);
        if (a1 != 0.0) {
            m = d1_stencil(i, n, h, offs, w);
            for (int k = 0; k < m; ++k) b.add(i, std::size_t(long(i) + offs[k]), a1 * w[k]);
        }
        b.add(i, i, a0);
    }
    return b.freeze(drift_free);
}

} // namespace detail

OperatorMatrix build_bs_hamiltonian(const GridSpec& grid, const BSParams& p) {
    p.validate();
    const double half_sig2 = 0.5 * p.sigma * p.sigma;
    const double drift = half_sig2 - p.r;
    return detail::assemble_1d(
        grid, [&](double) { return -half_sig2; }, [&](double) { return drift; },
        [&](double) { return p.r; });
}

OperatorMatrix build_mg_fixed_y_hamiltonian(const GridSpec& grid, const MGParams& p, double y) {
    p.validate();
    if (!std::isfinite(y)) throw ParameterError("build_mg_fixed_y_hamiltonian: y must be finite");
    const double ey = std::exp(y);
    return detail::assemble_1d(
        grid, [&](double) { return -ey / 2.0; }, [&](double) { return ey / 2.0 - p.r; },
        [&](double) { return p.r; });
}

OperatorMatrix build_mg_hamiltonian(const GridSpec& grid, const MGParams& p, YEdgePolicy policy) {
    p.validate();
    if (!grid.is_2d()) throw ParameterError("build_mg_hamiltonian: grid must be 2D");
    if (grid.n_x < 4 || grid.n_y < 4)
        throw ParameterError("build_mg_hamiltonian: needs at least 4 nodes per axis");
    const std::size_t nx = grid.n_x, ny = grid.n_y;
    const double hx = grid.h_x(), hy = grid.h_y();

    BandedBuilder b(grid);
    long ox[4], oy[4];
    double wx[4], wy[4];
    bool drift_free = true;

    for (std::size_t j = 0; j < ny; ++j) {
        const double y = grid.y(j);
        const double ey = std::exp(y);
        const double c_xx = -ey / 2.0;
        const double c_x = ey / 2.0 - p.r;
        const double c_y = -(p.lambda * std::exp(-y) + p.mu -
                             0.5 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0)));
        const double c_xy = -p.rho * p.zeta * std::exp(y * (p.alpha - 0.5));
        const double c_yy = -p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0));
        if (!std::isfinite(c_y) || !std::isfinite(c_xy) || !std::isfinite(c_yy))
            throw ParameterError("build_mg_hamiltonian: non-finite coefficient at y=" + std::to_string(y));
        if (c_x != 0.0 || c_y != 0.0) drift_free = false;

        const bool y_edge = (j == 0 || j == ny - 1);
        const bool drop_yy = policy == YEdgePolicy::outflow && y_edge;

        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t r = grid.index(i, j);

            int mx = detail::d2_stencil(i, nx, hx, ox, wx);
            for (int k = 0; k < mx; ++k)
                b.add(r, grid.index(std::size_t(long(i) + ox[k]), j), c_xx * wx[k]);

            if (c_x != 0.0) {
                mx = detail::d1_stencil(i, nx, hx, ox, wx);
                for (int k = 0; k < mx; ++k)
                    b.add(r, grid.index(std::size_t(long(i) + ox[k]), j), c_x * wx[k]);
            }

            if (c_y != 0.0) {
                const int my = detail::d1_stencil(j, ny, hy, oy, wy);
                for (int k = 0; k < my; ++k)
                    b.add(r, grid.index(i, std::size_t(long(j) + oy[k])), c_y * wy[k]);
            }

            if (c_yy != 0.0 && !drop_yy) {
                const int my = detail::d2_stencil(j, ny, hy, oy, wy);
                for (int k = 0; k < my; ++k)
                    b.add(r, grid.index(i, std::size_t(long(j) + oy[k])), c_yy * wy[k]);
            }

            if (c_xy != 0.0) {
                // d2/dxdy as the tensor product of the 1D first-derivative stencils
                mx = detail::d1_stencil(i, nx, hx, ox, wx);
                const int my = detail::d1_stencil(j, ny, hy, oy, wy);
                for (int a = 0; a < mx; ++a)
                    for (int c = 0; c < my; ++c)
                        b.add(r,
                              grid.index(std::size_t(long(i) + ox[a]), std::size_t(long(j) + oy[c])),
                              c_xy * wx[a] * wy[c]);
            }

            b.add(r, r, p.r);
        }
    }
    return b.freeze(drift_free);
}

double hermiticity_defect(const OperatorMatrix& H) {
    const std::size_t n = H.size();
    // distinct positive offset magnitudes
    std::vector<long> mags;
    for (long d : H.offsets()) {
        const long m = d < 0 ? -d : d;
        if (m > 0) mags.push_back(m);
    }
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

    double num2 = 0.0;
    for (long m : mags) {
        for (std::size_t r = 0; r + std::size_t(m) < n; ++r) {
            const std::size_t c = r + std::size_t(m);
            if (!H.is_interior(r) || !H.is_interior(c)) continue;
            const double diff = H.entry(r, c) - H.entry(c, r);
            num2 += 2.0 * diff * diff;
        }
    }
    double den2 = 0.0;
    for (std::size_t k = 0; k < H.offsets().size(); ++k) {
        const long d = H.offsets()[k];
        const auto& diag = H.diagonal(k);
        const std::size_t r0 = d < 0 ? std::size_t(-d) : 0;
        const std::size_t r1 = d > 0 ? n - std::size_t(d) : n;
        for (std::size_t r = r0; r < r1; ++r) {
            const std::size_t c = std::size_t(long(r) + d);
            if (!H.is_interior(r) || !H.is_interior(c)) continue;
            den2 += diag[r] * diag[r];
        }
    }
    return std::sqrt(num2) / std::max(1.0, std::sqrt(den2));
}

ValueField apply(const OperatorMatrix& H, const ValueField& f) { return H.apply(f); }

} // namespace hamfin
