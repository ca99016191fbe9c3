#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hamfin/errors.hpp"

namespace hamfin {

/**
 * Uniform truncated grid in log-price x (1D) or log-price x and
 * log-variance y (2D).
 *
 * Node coordinates are exactly x_i = x_min + i*h_x (and y_j analogous),
 * so two GridSpec instances with equal fields enumerate bit-identical
 * points. 2D fields are stored x-major: flat index m = ix*n_y + iy.
 */
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_x = 0;

    // 2D extension (log-variance axis); n_y == 0 means 1D.
    double y_min = 0.0;
    double y_max = 0.0;
    std::size_t n_y = 0;

    static GridSpec make_1d(double x_min, double x_max, std::size_t n_x) {
        GridSpec g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.n_x = n_x;
        g.validate();
        return g;
    }

    static GridSpec make_2d(double x_min, double x_max, std::size_t n_x,
                            double y_min, double y_max, std::size_t n_y) {
        GridSpec g;
        g.x_min = x_min;
        g.x_max = x_max;
        g.n_x = n_x;
        g.y_min = y_min;
        g.y_max = y_max;
        g.n_y = n_y;
        g.validate();
        return g;
    }

    bool is_2d() const { return n_y > 0; }

    double h_x() const { return (x_max - x_min) / double(n_x - 1); }
    double h_y() const { return (y_max - y_min) / double(n_y - 1); }

    double x(std::size_t i) const { return x_min + double(i) * h_x(); }
    double y(std::size_t j) const { return y_min + double(j) * h_y(); }

    /// Total number of nodes (n_x or n_x*n_y).
    std::size_t size() const { return is_2d() ? n_x * n_y : n_x; }

    /// Flat index of node (ix, iy) on a 2D grid.
    std::size_t index(std::size_t ix, std::size_t iy) const { return ix * n_y + iy; }

    void validate() const {
        if (!std::isfinite(x_min) || !std::isfinite(x_max))
            throw ParameterError("GridSpec: non-finite x range");
        if (!(x_min < x_max)) throw ParameterError("GridSpec: requires x_min < x_max");
        if (n_x < 3) throw ParameterError("GridSpec: requires n_x >= 3");
        if (n_y > 0) {
            if (!std::isfinite(y_min) || !std::isfinite(y_max))
                throw ParameterError("GridSpec: non-finite y range");
            if (!(y_min < y_max)) throw ParameterError("GridSpec: requires y_min < y_max");
            if (n_y < 3) throw ParameterError("GridSpec: requires n_y >= 3");
        }
    }

    bool operator==(const GridSpec&) const = default;
};

/**
 * A real-valued field sampled on a GridSpec enumeration, with a label
 * describing what it holds ("option price C", "martingale state e^x", ...).
 */
struct ValueField {
    std::vector<double> values;
    std::string label;

    ValueField() = default;
    ValueField(std::vector<double> v, std::string l) : values(std::move(v)), label(std::move(l)) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    void check_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw ParameterError("ValueField '" + label + "': non-finite entry");
    }
};

/// Sample f(x) on a 1D grid, or f(x_ix) broadcast over y on a 2D grid.
template <class F>
ValueField sample_x(const GridSpec& g, F&& f, std::string label) {
    ValueField out;
    out.label = std::move(label);
    out.values.resize(g.size());
    if (!g.is_2d()) {
        for (std::size_t i = 0; i < g.n_x; ++i) out.values[i] = f(g.x(i));
    } else {
        for (std::size_t i = 0; i < g.n_x; ++i) {
            const double fx = f(g.x(i));
            for (std::size_t j = 0; j < g.n_y; ++j) out.values[g.index(i, j)] = fx;
        }
    }
    return out;
}

/// Sample f(x, y) on a 2D grid.
template <class F>
ValueField sample_xy(const GridSpec& g, F&& f, std::string label) {
    if (!g.is_2d()) throw ParameterError("sample_xy requires a 2D grid");
    ValueField out;
    out.label = std::move(label);
    out.values.resize(g.size());
    for (std::size_t i = 0; i < g.n_x; ++i)
        for (std::size_t j = 0; j < g.n_y; ++j)
            out.values[g.index(i, j)] = f(g.x(i), g.y(j));
    return out;
}

} // namespace hamfin
