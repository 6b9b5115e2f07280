#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <variant>

#include "chemotax/diagnostics.hpp"
#include "chemotax/grid.hpp"
#include "chemotax/linsolve.hpp"
#include "chemotax/model.hpp"

namespace chemotax {

/// Simulation state at one time level. u is nonnegative cellwise; in the
/// nonlocal variant v and w are zero-mean deviations and may change sign.
struct SimState {
    double t = 0.0;
    double dt = 0.0; // dt of the step that produced this state
    long step_count = 0;
    Field u, v, w;
};

// ---------------------------------------------------------------------------
// Initial data presets
// ---------------------------------------------------------------------------

struct ConstantInit {
    double c = 1.0;

    bool operator==(const ConstantInit&) const = default;
};

struct GaussianInit {
    std::array<double, 2> center{0.0, 0.0};
    double width = 0.1;
    double amplitude = 1.0;
    double floor = 0.0;

    bool operator==(const GaussianInit&) const = default;
};

struct PerturbedConstantInit {
    double c = 1.0;
    double amplitude = 0.1;
    std::uint64_t seed = 0;

    bool operator==(const PerturbedConstantInit&) const = default;
};

struct FromFileInit {
    std::string path;

    bool operator==(const FromFileInit&) const = default;
};

using InitPreset = std::variant<ConstantInit, GaussianInit, PerturbedConstantInit, FromFileInit>;

/// Initial signal levels for tau=1 (ignored when the signals are elliptic,
/// and when the preset is from_file, which restores v and w itself).
struct SignalInit {
    double v0 = 0.0;
    double w0 = 0.0;
};

/// Builds the initial state: u0 from the preset (nonnegative), signals from
/// the elliptic solves (tau=0 / nonlocal) or from SignalInit (tau=1).
SimState init_state(const Grid& grid, const InitPreset& preset, const ValidatedModel& model,
                    const SignalInit& signals = {},
                    const LinearSolveOptions& linsolve = {});

// ---------------------------------------------------------------------------
// Fluxes and time stepping
// ---------------------------------------------------------------------------

/// Total face fluxes G for the u equation, in the orientation
/// u_i' = (G_{i+1/2} - G_{i-1/2})/h (+ y-direction analogue in 2D):
///   G = (ubar+1)^(m1-1) (u_R - u_L)/h + a * u_upwind,
///   a = -chi (ubar+1)^(m2-1) (v_R - v_L)/h + xi (ubar+1)^(m3-1) (w_R - w_L)/h,
/// ubar the arithmetic face average and the donor cell chosen by sign(a):
/// a > 0 moves mass toward -x, so the donor is the right cell. Boundary
/// faces carry zero flux.
struct FaceFluxes {
    std::vector<double> x; // (nx+1) * ny values, faces i-1/2 for i = 0..nx
    std::vector<double> y; // nx * (ny+1) values in 2D, empty in 1D
};

FaceFluxes compute_fluxes(const SimState& state, const ValidatedModel& model);

/// Largest explicit step the u update tolerates:
/// dt = cfl * min( h^2/(2 dim D_max), h/(2 dim |a|_max), 1/(lambda + mu r sup(u)^(r-1) + 1) )
/// clamped to [dt_min, dt_max]; throws DtUnderflow below dt_min.
double stable_dt(const SimState& state, const ValidatedModel& model, double cfl,
                 double dt_min = 1e-12,
                 double dt_max = std::numeric_limits<double>::infinity());

struct StepOptions {
    double cfl = 0.4;
    double dt_min = 1e-12;
    double dt_max = std::numeric_limits<double>::infinity();
    LinearSolveOptions linsolve{};
};

/// One time step: explicit Euler on the flux divergence plus the logistic
/// source (evaluated at u+ = max(u,0)), then the signal update (elliptic
/// solves for tau=0/nonlocal, implicit Euler for tau=1). The new u is
/// nonnegative cellwise. dt_cap additionally limits the step, e.g. to land
/// exactly on a time horizon.
SimState step(const SimState& state, const ValidatedModel& model,
              const StepOptions& options = {},
              double dt_cap = std::numeric_limits<double>::infinity());

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

enum class RunVerdict { completed, blowup_suspected };

struct RunOptions {
    double horizon = 1.0;          // T
    StepOptions step{};
    double record_interval = 0.0;  // 0: horizon/500
    double blowup_threshold = 1e6;
    std::vector<double> p_list{2.0};
    double phi_exponent = 2.0;
};

struct RunHooks {
    // Called after every recorded sample with the state it was taken from.
    std::function<void(const SimState&)> on_sample;
};

struct RunResult {
    TimeSeries series;
    SimState final_state;
    RunVerdict verdict = RunVerdict::completed;
    std::string reason; // nonempty for blowup_suspected

    std::string verdict_string() const;
};

/// Steps until t >= horizon, the sup norm crosses blowup_threshold, or the
/// stable dt underflows dt_min; diagnostics are recorded every
/// record_interval (plus the initial and final states).
RunResult run(const ValidatedModel& model, const Grid& grid, const InitPreset& preset,
              const RunOptions& options, const SignalInit& signals = {},
              const RunHooks& hooks = {});

// ---------------------------------------------------------------------------
// Snapshot I/O
// ---------------------------------------------------------------------------

/// Text table: "# t=<time> dim=<d> nx=<..> [ny=<..>]" then one row per cell
/// "x[,y],u,v,w" at 17 significant digits, x fastest.
void write_snapshot(std::ostream& out, const SimState& state);

/// Reads a snapshot written by write_snapshot onto the given grid.
/// Throws FileFormatError on malformed input or a cell-count mismatch.
SimState read_snapshot(std::istream& in, const Grid& grid);

} // namespace chemotax
