#include <doctest.h>

#include <cmath>
#include <random>

#include "hamfin/errors.hpp"
#include "hamfin/martingale.hpp"
#include "hamfin/operators.hpp"
#include "oracles.hpp"

using namespace hamfin;

TEST_CASE("GridSpec invariants and bit-reproducible nodes") {
    const GridSpec g = GridSpec::make_1d(-6.0, 6.0, 5);
    CHECK(g.h_x() == doctest::Approx(3.0));
    const GridSpec g2 = GridSpec::make_1d(-6.0, 6.0, 5);
    for (std::size_t i = 0; i < g.n_x; ++i) CHECK(g.x(i) == g2.x(i));  // exact

    CHECK_THROWS_AS(GridSpec::make_1d(1.0, -1.0, 9), ParameterError);
    CHECK_THROWS_AS(GridSpec::make_1d(-1.0, 1.0, 2), ParameterError);
    CHECK_THROWS_AS(GridSpec::make_2d(-1.0, 1.0, 5, 2.0, -2.0, 5), ParameterError);
    CHECK_THROWS_AS(GridSpec::make_1d(std::nan(""), 1.0, 5), ParameterError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(build_bs_hamiltonian(GridSpec::make_1d(-1, 1, 9), BSParams{0.05, -0.2}),
                    ParameterError);
    CHECK_THROWS_AS(build_bs_hamiltonian(GridSpec::make_1d(-1, 1, 9),
                                         BSParams{std::nan(""), 0.2}),
                    ParameterError);
    MGParams bad;
    bad.rho = 1.5;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad.rho = 0.0;
    bad.zeta = -0.1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("BS Hamiltonian annihilates constants up to the rate term") {
    const GridSpec g = GridSpec::make_1d(-6.0, 6.0, 5);
    SUBCASE("r = 0: applying to the constant field gives zero everywhere") {
        const OperatorMatrix H = build_bs_hamiltonian(g, BSParams{0.0, std::sqrt(2.0)});
        const ValueField one = sample_x(g, [](double) { return 1.0; }, "1");
        const ValueField r = H.apply(one);
        for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("r != 0: constant field maps to r * field") {
        const OperatorMatrix H = build_bs_hamiltonian(g, BSParams{0.07, 0.3});
        const ValueField one = sample_x(g, [](double) { return 1.0; }, "1");
        const ValueField r = H.apply(one);
        for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(0.07).epsilon(1e-12));
    }
}

TEST_CASE("banded apply agrees with the dense product on small instances") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const GridSpec g1 = GridSpec::make_1d(-2.0, 2.0, 17);
    const GridSpec g2 = GridSpec::make_2d(-2.0, 2.0, 8, -1.0, 1.0, 6);
    MGParams mp;
    mp.r = 0.04;
    mp.lambda = 0.1;
    mp.mu = -0.2;
    mp.zeta = 0.4;
    mp.rho = -0.6;
    mp.alpha = 0.7;
    const OperatorMatrix ops[] = {build_bs_hamiltonian(g1, BSParams{0.05, 0.2}),
                                  build_mg_hamiltonian(g2, mp)};
    for (const auto& H : ops) {
        REQUIRE(H.size() <= 64);
        const auto dense = oracle::dense_from_operator(H);
        ValueField f;
        f.values.resize(H.size());
        for (auto& v : f.values) v = u(gen);
        const auto expect = oracle::dense_matvec(dense, f.values);
        const ValueField got = H.apply(f);
        for (std::size_t i = 0; i < H.size(); ++i)
            CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-13));
    }
}

TEST_CASE("apply is linear and scales identities") {
    const GridSpec g = GridSpec::make_1d(-3.0, 3.0, 33);
    const OperatorMatrix H = build_bs_hamiltonian(g, BSParams{0.03, 0.25});
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ValueField f, h;
    f.values.resize(g.n_x);
    h.values.resize(g.n_x);
    for (std::size_t i = 0; i < g.n_x; ++i) {
        f.values[i] = u(gen);
        h.values[i] = u(gen);
    }
    const double a = 1.7, b = -0.4;
    ValueField combo;
    combo.values.resize(g.n_x);
    for (std::size_t i = 0; i < g.n_x; ++i) combo.values[i] = a * f[i] + b * h[i];
    const ValueField lhs = H.apply(combo);
    const ValueField hf = H.apply(f), hh = H.apply(h);
    for (std::size_t i = 0; i < g.n_x; ++i)
        CHECK(lhs[i] == doctest::Approx(a * hf[i] + b * hh[i]).epsilon(1e-13));

    CHECK_THROWS_AS(H.apply(ValueField(std::vector<double>(5, 1.0), "short")), DimensionError);
}

TEST_CASE("interior truncation error decays at second order on smooth fields") {
    const BSParams p{0.05, 0.2};
    auto residual_for = [&](std::size_t n, auto field, auto analytic_image) {
        const GridSpec g = GridSpec::make_1d(-4.0, 4.0, n);
        const OperatorMatrix H = build_bs_hamiltonian(g, p);
        ValueField f = sample_x(g, field, "f");
        const ValueField img = H.apply(f);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n_x; ++i) {
            if (!H.is_interior(i)) continue;
            worst = std::max(worst, std::abs(img[i] - analytic_image(g.x(i))));
        }
        return std::pair{g.h_x(), worst};
    };

    SUBCASE("e^x is annihilated at order 2") {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t n : {257, 513, 1025})
            pts.push_back(residual_for(n, [](double x) { return std::exp(x); },
                                       [](double) { return 0.0; }));
        const double order = estimate_order(pts);
        CHECK(order == doctest::Approx(2.0).epsilon(0.1));
        // n = 1025 residual against the L-infinity size of e^x
        CHECK(pts.back().second <= 1e-3 * std::exp(4.0));
    }
    SUBCASE("sin x maps to its analytic image at order 2") {
        const double half_sig2 = 0.5 * p.sigma * p.sigma;
        const double drift = half_sig2 - p.r;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t n : {257, 513, 1025})
            pts.push_back(residual_for(
                n, [](double x) { return std::sin(x); },
                [&](double x) {
                    return half_sig2 * std::sin(x) + drift * std::cos(x) + p.r * std::sin(x);
                }));
        CHECK(estimate_order(pts) == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("Hermiticity defect tracks the drift term") {
    const GridSpec g = GridSpec::make_1d(-4.0, 4.0, 201);
    SUBCASE("r = sigma^2/2 gives an exactly symmetric operator") {
        const double sigma = 0.2;
        const BSParams p{0.5 * sigma * sigma, sigma};
        const OperatorMatrix H = build_bs_hamiltonian(g, p);
        CHECK(H.drift_free());
        CHECK(hermiticity_defect(H) <= 1e-14);
    }
    SUBCASE("generic drift gives a strictly positive defect") {
        const OperatorMatrix H = build_bs_hamiltonian(g, BSParams{0.05, 0.2});
        CHECK(!H.drift_free());
        CHECK(hermiticity_defect(H) > 1e-6);
    }
    SUBCASE("MG x-sector at fixed y: symmetric exactly at r = e^y/2") {
        MGParams p;
        p.zeta = 0.0;
        p.rho = 0.0;
        const double y = 0.3;
        p.r = 0.5 * std::exp(y);
        const OperatorMatrix H = build_mg_fixed_y_hamiltonian(g, p, y);
        CHECK(hermiticity_defect(H) <= 1e-14);
        p.r = 0.05;
        CHECK(hermiticity_defect(build_mg_fixed_y_hamiltonian(g, p, y)) > 1e-6);
    }
    SUBCASE("full MG operator with varying y rows is non-Hermitian") {
        const GridSpec g2 = GridSpec::make_2d(-3.0, 3.0, 33, -1.0, 1.0, 17);
        MGParams p;
        p.r = 0.05;
        p.zeta = 0.3;
        p.rho = -0.5;
        p.alpha = 1.0;
        p.mu = 0.1;
        CHECK(hermiticity_defect(build_mg_hamiltonian(g2, p)) > 1e-6);
    }
}

TEST_CASE("rebuilding with identical inputs is bit-identical") {
    const GridSpec g = GridSpec::make_1d(-4.0, 4.0, 129);
    const BSParams p{0.05, 0.2};
    const OperatorMatrix a = build_bs_hamiltonian(g, p);
    const OperatorMatrix b = build_bs_hamiltonian(g, p);
    REQUIRE(a.offsets() == b.offsets());
    for (std::size_t k = 0; k < a.offsets().size(); ++k)
        for (std::size_t r = 0; r < a.size(); ++r)
            CHECK(a.diagonal(k)[r] == b.diagonal(k)[r]);  // exact
}

TEST_CASE("MG operator with the volatility sector switched off reduces to BS rows") {
    MGParams p;
    p.r = 0.05;
    const GridSpec g2 = GridSpec::make_2d(-3.0, 3.0, 21, -1.0, 1.0, 7);
    const OperatorMatrix Hmg = build_mg_hamiltonian(g2, p);
    for (std::size_t j = 0; j < g2.n_y; ++j) {
        const double sigma = std::exp(0.5 * g2.y(j));
        const GridSpec g1 = GridSpec::make_1d(g2.x_min, g2.x_max, g2.n_x);
        const OperatorMatrix Hbs = build_bs_hamiltonian(g1, BSParams{p.r, sigma});
        for (std::size_t i = 0; i < g2.n_x; ++i) {
            for (std::size_t c = 0; c < g2.n_x; ++c) {
                CHECK(Hmg.entry(g2.index(i, j), g2.index(c, j)) ==
                      doctest::Approx(Hbs.entry(i, c)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("MG applied to a y-constant field matches the row-wise 1D build") {
    MGParams p;
    p.r = 0.04;
    p.lambda = 0.2;
    p.mu = -0.3;
    p.zeta = 0.5;
    p.rho = 0.4;
    p.alpha = 0.8;
    const GridSpec g2 = GridSpec::make_2d(-2.0, 2.0, 41, -1.5, 0.5, 9);
    const OperatorMatrix Hmg = build_mg_hamiltonian(g2, p);
    const ValueField ex2 = sample_x(g2, [](double x) { return std::exp(x); }, "e^x");
    const ValueField img2 = Hmg.apply(ex2);

    const GridSpec g1 = GridSpec::make_1d(g2.x_min, g2.x_max, g2.n_x);
    const ValueField ex1 = sample_x(g1, [](double x) { return std::exp(x); }, "e^x");
    for (std::size_t j = 0; j < g2.n_y; ++j) {
        const OperatorMatrix H1 = build_mg_fixed_y_hamiltonian(g1, p, g2.y(j));
        const ValueField img1 = H1.apply(ex1);
        for (std::size_t i = 0; i < g2.n_x; ++i)
            CHECK(img2[g2.index(i, j)] == doctest::Approx(img1[i]).epsilon(1e-11));
    }
}
