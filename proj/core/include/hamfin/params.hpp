#pragma once

#include <cmath>

#include "hamfin/errors.hpp"

namespace hamfin {

/// Black-Scholes model parameters: spot rate r and volatility sigma.
struct BSParams {
    double r = 0.0;
    double sigma = 0.0;

    void validate() const {
        if (!std::isfinite(r)) throw ParameterError("BSParams: r must be finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw ParameterError("BSParams: sigma must be finite and > 0");
    }
};

/**
 * Merton-Garman model parameters.
 *
 * lambda is the volatility drift intercept with the market price of
 * volatility risk already absorbed (the shifted parameter), mu the drift
 * slope, zeta the vol-of-vol, rho the correlation between the price and
 * volatility noises, alpha the variance exponent.
 */
struct MGParams {
    double r = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double zeta = 0.0;
    double rho = 0.0;
    double alpha = 1.0;

    void validate() const {
        if (!std::isfinite(r) || !std::isfinite(lambda) || !std::isfinite(mu) ||
            !std::isfinite(zeta) || !std::isfinite(rho) || !std::isfinite(alpha))
            throw ParameterError("MGParams: all parameters must be finite");
        if (std::abs(rho) > 1.0) throw ParameterError("MGParams: requires |rho| <= 1");
        if (zeta < 0.0) throw ParameterError("MGParams: requires zeta >= 0");
    }
};

} // namespace hamfin
