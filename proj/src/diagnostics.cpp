#include "chemotax/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace chemotax {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string gshort(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

double total_mass(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.cell_measure();
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw PLessThanOne("lp_norm needs p >= 1");
    double s = 0.0;
    for (double v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid.cell_measure(), 1.0 / p);
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double phi_functional(const Field& u, double p) {
    if (!(p > 1.0)) throw PNotGreaterThanOne("phi needs p > 1");
    double s = 0.0;
    for (double v : u.values) s += std::pow(v + 1.0, p);
    return s * u.grid.cell_measure() / p;
}

double corrector_pointwise(double u, double j, double p) {
    const double a = p + j - 1.0; // exponent of the leading antiderivative term
    const double b = p + j - 2.0;
    if (!(a > 0.0)) {
        throw ExponentDegenerate("corrector needs p+j-1 > 0");
    }
    if (!(u >= 0.0)) throw NegativeArgument("corrector evaluated at negative u");
    const double log1pu = std::log1p(u);
    const double lead = std::expm1(a * log1pu) / a; // ((u+1)^a - 1)/a
    if (b == 0.0) {
        return lead - log1pu;
    }
    return lead - std::expm1(b * log1pu) / b;
}

double corrector_functional(const Field& u, double j, double p) {
    double s = 0.0;
    for (double v : u.values) s += corrector_pointwise(v, j, p);
    return s * u.grid.cell_measure();
}

void TimeSeries::append(Sample s) {
    if (!samples.empty() && !(s.t > samples.back().t)) {
        throw Error("time series samples must have strictly increasing times");
    }
    samples.push_back(std::move(s));
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& series) {
    out << "t,mass,sup_u,sup_v,sup_w,dt,phi_p";
    for (double p : series.p_list) out << ",lp_" << gshort(p);
    out << '\n';
    for (const Sample& s : series.samples) {
        out << g17(s.t) << ',' << g17(s.mass) << ',' << g17(s.sup_u) << ','
            << g17(s.sup_v) << ',' << g17(s.sup_w) << ',' << g17(s.dt) << ','
            << g17(s.phi_p);
        for (double v : s.lp) out << ',' << g17(v);
        out << '\n';
    }
    out << "# verdict=" << series.verdict << '\n';
}

const char* to_string(SeriesVerdict v) {
    switch (v) {
        case SeriesVerdict::bounded: return "Bounded";
        case SeriesVerdict::blowup_suspected: return "BlowupSuspected";
        case SeriesVerdict::inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(Consistency c) {
    switch (c) {
        case Consistency::agreement: return "Agreement";
        case Consistency::tension: return "Tension";
        case Consistency::no_claim: return "NoClaim";
        case Consistency::unresolved: return "Unresolved";
    }
    return "?";
}

SeriesVerdict detect_blowup(const TimeSeries& series, const BlowupThresholds& thresholds) {
    const auto& samples = series.samples;
    if (samples.empty()) throw EmptySeries("detect_blowup on empty series");

    for (const Sample& s : samples) {
        if (s.sup_u >= thresholds.sup_threshold) return SeriesVerdict::blowup_suspected;
        if (s.dt > 0.0 && s.dt <= thresholds.dt_min * (1.0 + 1e-9)) {
            return SeriesVerdict::blowup_suspected;
        }
    }

    const std::size_t n = samples.size();
    const std::size_t window = std::max<std::size_t>(2, (n + 9) / 10);
    if (n >= window) {
        const Sample& first = samples[n - window];
        const Sample& last = samples[n - 1];
        if (first.sup_u > 0.0 && last.sup_u / first.sup_u >= thresholds.growth_factor) {
            return SeriesVerdict::blowup_suspected;
        }
    }

    if (n == 1) return SeriesVerdict::bounded;
    const std::size_t half = (n + 1) / 2;
    double first_max = 0.0;
    double second_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double& m = i < half ? first_max : second_max;
        m = std::max(m, samples[i].sup_u);
    }
    if (second_max <= (1.0 + thresholds.plateau_tol) * first_max) {
        return SeriesVerdict::bounded;
    }
    return SeriesVerdict::inconclusive;
}

BoundednessReport boundedness_report(const TimeSeries& series,
                                     const theory::RegimeReport& regime,
                                     const ValidatedModel& model,
                                     double omega_measure,
                                     const BlowupThresholds& thresholds) {
    BoundednessReport report;
    report.sim_verdict = detect_blowup(series, thresholds);
    // A run that aborted (threshold or dt collapse) is suspect even when the
    // recorded samples alone look tame, e.g. after a one-step dt crash.
    if (series.verdict.rfind("BlowupSuspected", 0) == 0) {
        report.sim_verdict = SeriesVerdict::blowup_suspected;
    }

    const ModelSpec& spec = model.spec();
    report.mass_bound = nan;
    report.mass_margin = nan;
    if (spec.lambda > 0.0 && spec.mu > 0.0 && !series.samples.empty()) {
        const double m0 = series.samples.front().mass;
        if (m0 > 0.0) {
            report.mass_bound =
                theory::mass_bound(spec.lambda, spec.mu, spec.r, omega_measure, m0);
            double max_mass = 0.0;
            for (const Sample& s : series.samples) max_mass = std::max(max_mass, s.mass);
            report.mass_margin = max_mass / report.mass_bound;
        }
    }

    if (regime.verdict == theory::Verdict::not_covered) {
        report.flag = Consistency::no_claim;
        report.advice = "theory layer makes no claim for these parameters";
    } else if (report.sim_verdict == SeriesVerdict::bounded) {
        report.flag = Consistency::agreement;
    } else if (report.sim_verdict == SeriesVerdict::blowup_suspected) {
        report.flag = Consistency::tension;
        report.advice =
            "certified-bounded regime looks unbounded numerically; refine the grid "
            "and lower cfl before trusting either side";
    } else {
        report.flag = Consistency::unresolved;
        report.advice = "run longer: the series neither plateaued nor grew decisively";
    }
    return report;
}

} // namespace chemotax
