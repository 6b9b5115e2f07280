#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chemotax/grid.hpp"
#include "chemotax/theory.hpp"

namespace chemotax {

// ---------------------------------------------------------------------------
// Norms and functionals (midpoint quadrature, matching the finite volumes)
// ---------------------------------------------------------------------------

double total_mass(const Field& f);
double lp_norm(const Field& f, double p); // throws PLessThanOne
double sup_norm(const Field& f);

/// phi(u) = (1/p) * integral of (u+1)^p, p > 1.
double phi_functional(const Field& u, double p);

/// Antiderivative F(u) = integral_0^u s*(s+1)^(p+j-3) ds in closed form.
/// Requires p+j-1 > 0; the branch p+j-2 = 0 switches to the logarithmic
/// antiderivative. Satisfies
///   u^(p+j-1)/(p+j-1) <= F(u) <= ((u+1)^(p+j-1) - 1)/(p+j-1).
double corrector_pointwise(double u, double j, double p);

/// Integral of the corrector over the domain: sum F(u_i)*cell_measure.
double corrector_functional(const Field& u, double j, double p);

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

struct Sample {
    double t = 0.0;
    double mass = 0.0;
    double sup_u = 0.0;
    double sup_v = 0.0;
    double sup_w = 0.0;
    double dt = 0.0;      // dt of the step that produced this state (0 at t=0)
    double phi_p = 0.0;
    std::vector<double> lp; // aligned with TimeSeries::p_list

    bool operator==(const Sample&) const = default;
};

struct TimeSeries {
    std::vector<double> p_list{2.0};
    double phi_exponent = 2.0;
    std::vector<Sample> samples;
    std::string verdict; // run verdict, e.g. "Completed"

    /// Enforces strictly increasing sample times.
    void append(Sample s);

    bool operator==(const TimeSeries&) const = default;
};

/// CSV with header t,mass,sup_u,sup_v,sup_w,dt,phi_p,lp_<p>..., one row per
/// sample at 17 significant digits, and a trailing "# verdict=..." line.
void write_timeseries_csv(std::ostream& out, const TimeSeries& series);

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

struct BlowupThresholds {
    double sup_threshold = 1e6;
    double dt_min = 1e-12;
    double growth_factor = 10.0; // growth within the final 10% of samples
    double plateau_tol = 1e-3;   // last-half max vs first-half max
};

enum class SeriesVerdict { bounded, blowup_suspected, inconclusive };

const char* to_string(SeriesVerdict v);

/// Blow-up suspicion: sup_u crossed the threshold, dt collapsed to dt_min,
/// or sup_u grew by >= growth_factor within the final 10% of samples.
/// Bounded requires a plateau: the largest sup_u in the second half of the
/// run must not exceed the first-half maximum by more than plateau_tol,
/// the checkable surrogate for a uniform-in-time bound. Anything else is
/// inconclusive.
SeriesVerdict detect_blowup(const TimeSeries& series, const BlowupThresholds& thresholds = {});

enum class Consistency { agreement, tension, no_claim, unresolved };

const char* to_string(Consistency c);

/// Simulation vs theory-layer prediction for one completed run.
struct BoundednessReport {
    Consistency flag = Consistency::no_claim;
    SeriesVerdict sim_verdict = SeriesVerdict::inconclusive;
    double mass_bound = 0.0;  // M from the theory layer (NaN in test mode)
    double mass_margin = 0.0; // max recorded mass / M (NaN in test mode)
    std::string advice;
};

/// Combines detect_blowup on the samples with the series' own run verdict
/// (an aborted run counts as suspect even if the recorded samples look tame).
BoundednessReport boundedness_report(const TimeSeries& series,
                                     const theory::RegimeReport& regime,
                                     const ValidatedModel& model,
                                     double omega_measure,
                                     const BlowupThresholds& thresholds = {});

} // namespace chemotax
