// hamfin: Hamiltonian option-pricing and martingale-analysis CLI.
//
//   hamfin <price|martingale|vacuum|hermitize|simulate|ssb>
//          --config FILE [--out DIR] [--seed N] [--tol X]

#include <CLI11.hpp>

#include "hamfin/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian pricing, martingale-as-vacuum checks and "
                 "symmetry-breaking analysis for the BS and MG models"};
    app.require_subcommand(1);

    hamfin::cli::CmdOptions opt;

    const char* names[] = {"price", "martingale", "vacuum", "hermitize", "simulate", "ssb"};
    const char* blurbs[] = {
        "evolve a terminal payoff and write price.csv + report.json",
        "residuals of the Hamiltonian on a candidate martingale state over grid refinements",
        "vacuum field values, degeneracy class and the two-field MG system",
        "similarity-transform Hermitization diagnostics",
        "Monte Carlo SDE runs and the discounted-price martingale test",
        "quartic symmetry-breaking potential: vacuum manifold and flatness report",
    };
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", opt.config_path, "run configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory (default: .)");
        sub->add_option_function<std::string>(
               "--seed", [&](const std::string& s) { opt.seed = std::stoull(s); },
               "override [mc] seed");
        sub->add_option_function<std::string>(
               "--tol", [&](const std::string& s) { opt.tol = std::stod(s); },
               "override [analysis] tol");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hamfin::cli::exit_config;
    }

    return hamfin::cli::run_command(app.get_subcommands().front()->get_name(), opt);
}
