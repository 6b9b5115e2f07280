#pragma once

#include <iosfwd>
#include <string>

#include "chemotax/config.hpp"

namespace chemotax {
namespace cli {

// Exit-code contract shared by all subcommands:
//   0 success / bounded / completed
//   1 error (bad input, I/O, solver failure)
//   2 classifier verdict NotCovered
//   3 run verdict BlowupSuspected
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_not_covered = 2;
inline constexpr int exit_blowup = 3;

struct ClassifyParams {
    std::string variant = "local";
    int tau = 0;
    double m1 = 1.0;
    double m2 = 1.0;
    double m3 = 1.0;
    double k = 1.0;
    double l = 1.0;
    double r = 2.0;
    int n = 1;
};

/// Prints one CSV row "a1,a2,a3,a4,a5,verdict,witness".
int cmd_classify(const ClassifyParams& params, std::ostream& out, std::ostream& err);

struct ExponentsParams {
    double m1 = 1.0;
    double m2 = 1.0;
    double m3 = 1.0;
    double k = 1.0;
    double l = 1.0;
    int n = 1;
    double p = 0.0;        // required unless find_pbar
    double q = 0.0;        // 0: use max{l, m3+l-1}+1
    bool find_pbar = false;
    std::string require;   // comma list of relation names; empty = all
};

/// Prints the exponent CSV row (plus relation flags), or the p-bar value
/// with --find-pbar.
int cmd_exponents(const ExponentsParams& params, std::ostream& out, std::ostream& err);

/// Runs one simulation from a config file; writes the time-series CSV,
/// snapshots, and a regime-report sidecar into the output directory.
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Runs the [sweep] grid from a config file; always classifies, optionally
/// simulates, and writes regime_map.csv. jobs <= 0 picks the hardware
/// parallelism; the CHEMO_JOBS environment variable overrides either.
int cmd_sweep(const std::string& config_path, int jobs, std::ostream& out, std::ostream& err);

/// Effective worker count from the flag, CHEMO_JOBS, and the hardware.
int resolve_jobs(int jobs_flag);

} // namespace cli
} // namespace chemotax
