#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hamfin/run_config.hpp"

namespace hamfin::cli {

/// Stable exit-code contract shared by all subcommands.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_numerical = 2,
    exit_constraint = 3,
};

struct CmdOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides [mc] seed
    std::optional<double> tol;          // overrides [analysis] tol
};

int cmd_price(const CmdOptions& opt);
int cmd_martingale(const CmdOptions& opt);
int cmd_vacuum(const CmdOptions& opt);
int cmd_hermitize(const CmdOptions& opt);
int cmd_simulate(const CmdOptions& opt);
int cmd_ssb(const CmdOptions& opt);

/// Dispatch by subcommand name; maps exceptions onto the exit-code contract.
int run_command(const std::string& name, const CmdOptions& opt);

} // namespace hamfin::cli
