#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hamfin/evolution.hpp"
#include "hamfin/params.hpp"

namespace hamfin {

enum class SDEModel { gbm, mg };

/**
 * SDE configuration for the Monte Carlo engine. phi is the expected
 * return; set phi = r for risk-neutral runs (the martingale test assumes
 * it). GBM steps ln S, where per-step lognormal increments are exact; MG
 * steps (S, V) with Euler-Maruyama and correlated noises.
 */
struct SDEParams {
    SDEModel model = SDEModel::gbm;
    double phi = 0.0;
    double S0 = 0.0;
    double sigma = 0.0;  // gbm
    double V0 = 0.0;     // mg
    MGParams mg;         // mg

    void validate() const;
};

/**
 * Terminal Monte Carlo sample with per-path RNG provenance: the ensemble
 * is bit-reproducible from (seed, n_paths, n_steps, params) regardless of
 * how paths were distributed over workers.
 */
struct PathEnsemble {
    SDEModel model = SDEModel::gbm;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
    double phi = 0.0;
    double S0 = 0.0;
    std::vector<double> terminal_S;
    std::vector<double> terminal_V;          // mg only
    double realized_noise_correlation = 0.0; // mg only (sample Pearson of increments)
    double floor_hit_fraction = 0.0;         // fraction of steps with V < 0
    bool stability_warning = false;          // floor hits on > 1% of steps
};

PathEnsemble simulate(const SDEParams& params, double T, std::size_t n_steps, std::size_t n_paths,
                      std::uint64_t seed, unsigned n_workers = 0);

/**
 * Statistical check of the discounted-price martingale property
 * S0 = E[e^{-rT} S_T]: the z-score of the discounted sample mean against
 * S0. expected_fail flags ensembles generated with phi != r, where the
 * test is informational and should reject.
 */
struct MartingaleStat {
    double discounted_mean = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    bool expected_fail = false;
};

MartingaleStat martingale_test(const PathEnsemble& e, double r, double T);

/// Discounted payoff mean and its standard error.
std::pair<double, double> mc_price(const PathEnsemble& e, const PayoffSpec& payoff, double r,
                                   double T);

} // namespace hamfin
