#include "chemotax/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemotax {
namespace theory {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

void require_hypothesis_params(double k, double l, double r, int n) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw InvalidHypothesisParameter("k must be positive");
    }
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw InvalidHypothesisParameter("l must be positive");
    }
    if (!(r > 1.0) || !std::isfinite(r)) {
        throw InvalidHypothesisParameter("r must exceed 1");
    }
    if (n < 1) {
        throw InvalidHypothesisParameter("n must be a positive integer");
    }
}

} // namespace

AssumptionSet check_assumptions(double m1, double m2, double m3,
                                double k, double l, double r, int n) {
    require_hypothesis_params(k, l, r, n);
    if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(m3)) {
        throw InvalidHypothesisParameter("m1, m2, m3 must be finite");
    }
    const double crit = m1 + 2.0 / static_cast<double>(n);
    AssumptionSet a;
    a.a1 = m2 + k < m3 + l;
    a.a2 = m2 + k < r;
    a.a3 = m2 + k < crit;
    a.a4 = m3 + l < r;
    a.a5 = m3 + l < crit;
    return a;
}

std::string RegimeReport::witness_string() const {
    std::string out;
    for (const auto& w : witnesses) {
        if (!out.empty()) out += '+';
        out += w;
    }
    return out;
}

RegimeReport classify(const ValidatedModel& model) {
    const ModelSpec& spec = model.spec();
    if (!(spec.lambda > 0.0) || !(spec.mu > 0.0)) {
        throw InvalidHypothesisParameter(
            "classification requires lambda>0 and mu>0 (test-mode specs refused)");
    }
    const double k = spec.attractant.k();
    const double l = spec.repellent.l();
    RegimeReport report;
    report.assumptions =
        check_assumptions(spec.m1, spec.m2, spec.m3, k, l, spec.r, spec.n);
    const AssumptionSet& a = report.assumptions;

    if (spec.tau == 0) {
        report.criterion = "tau0";
        if (a.a1) report.witnesses.push_back("A1");
        if (a.a2) report.witnesses.push_back("A2");
        if (a.a3) report.witnesses.push_back("A3");
        report.verdict = (a.a1 || a.a2 || a.a3) ? Verdict::bounded : Verdict::not_covered;
    } else {
        report.criterion = "tau1";
        const bool first = a.a2 || a.a3;
        const bool second = a.a4 || a.a5;
        if (first && second) {
            report.verdict = Verdict::bounded;
            if (a.a2) report.witnesses.push_back("A2");
            if (a.a3) report.witnesses.push_back("A3");
            if (a.a4) report.witnesses.push_back("A4");
            if (a.a5) report.witnesses.push_back("A5");
        }
    }

    std::ostringstream notes;
    const double theta0 = spec.chi * spec.attractant.alpha() - spec.xi * spec.repellent.gamma0();
    notes << "chi*alpha - xi*gamma0 = " << theta0 << " (informational)";
    if (report.verdict == Verdict::not_covered) {
        notes << "; not covered: no boundedness claim, no blow-up claim";
    }
    report.notes = notes.str();
    return report;
}

double mass_bound(double lambda, double mu, double r,
                  double omega_measure, double initial_mass) {
    if (!(lambda > 0.0)) throw NonPositiveParameter("lambda must be positive");
    if (!(mu > 0.0)) throw NonPositiveParameter("mu must be positive");
    if (!(omega_measure > 0.0)) throw NonPositiveParameter("|Omega| must be positive");
    if (!(initial_mass > 0.0)) throw NonPositiveParameter("initial mass must be positive");
    if (!(r > 1.0)) throw RNotGreaterThanOne("r must exceed 1");
    const double logistic_cap =
        std::pow(lambda / mu * std::pow(omega_measure, r - 1.0), 1.0 / (r - 1.0));
    return std::max(initial_mass, logistic_cap);
}

const char* relation_name(Relation rel) {
    switch (rel) {
        case rel_theta: return "theta";
        case rel_sigma_theta: return "sigma_theta";
        case rel_theta1: return "theta1";
        case rel_sigma1_theta1: return "sigma1_theta1";
        case rel_theta2: return "theta2";
        case rel_sigma1_theta2: return "sigma1_theta2";
        case rel_theta4: return "theta4";
        case rel_sigma2_theta4: return "sigma2_theta4";
        case rel_theta3: return "theta3";
    }
    return "?";
}

ExponentSet gn_exponents(double p, double q, int n,
                         double m1, double m2, double m3, double k, double l) {
    if (!(p > 1.0)) throw DegenerateDenominator("p must exceed 1");
    if (!(q > 1.0)) throw DegenerateDenominator("q must exceed 1");
    if (n < 1) throw InvalidHypothesisParameter("n must be a positive integer");
    const double e2 = p + m2 + k - 1.0;
    const double e3 = p + m3 + l - 1.0;
    const double e1 = p + m1 - 1.0;
    if (!(e2 > 0.0)) throw DegenerateDenominator("p+m2+k-1 must be positive");
    if (!(e3 > 0.0)) throw DegenerateDenominator("p+m3+l-1 must be positive");
    if (!(e1 > 0.0)) throw DegenerateDenominator("p+m1-1 must be positive");

    const double half = 0.5 * e1;
    const double den = half - 0.5 + 1.0 / static_cast<double>(n);
    if (den == 0.0) throw DegenerateDenominator("interpolation denominator vanishes");

    ExponentSet set;
    set.p = p;
    set.q = q;
    set.theta = (half - half / e2) / den;
    set.sigma = 2.0 * e2 / e1;
    set.theta1 = (half - half / e3) / den;
    set.sigma1 = 2.0 * e3 / e1;
    set.has_theta2 = l > 1.0;
    set.theta2 = set.has_theta2 ? (half - half / l) / den : nan;
    set.theta3 = (half - half / p) / den;
    set.theta4 = (half - half / q) / den;
    set.sigma2 = 2.0 * (p + q) / e1;

    unsigned holding = 0;
    if (in_open_unit(set.theta)) holding |= rel_theta;
    if (in_open_unit(0.5 * set.sigma * set.theta)) holding |= rel_sigma_theta;
    if (in_open_unit(set.theta1)) holding |= rel_theta1;
    if (in_open_unit(0.5 * set.sigma1 * set.theta1)) holding |= rel_sigma1_theta1;
    if (set.has_theta2) {
        if (in_open_unit(set.theta2)) holding |= rel_theta2;
        if (in_open_unit(0.5 * set.sigma1 * set.theta2)) holding |= rel_sigma1_theta2;
    }
    if (in_open_unit(set.theta4)) holding |= rel_theta4;
    if (in_open_unit(0.5 * set.sigma2 * set.theta4)) holding |= rel_sigma2_theta4;
    if (in_open_unit(set.theta3)) holding |= rel_theta3;
    set.holding = holding;
    return set;
}

double default_q(double l, double m3) {
    return std::max(l, m3 + l - 1.0) + 1.0;
}

namespace {

// Relations holding at p, with degenerate points counting as "none hold".
unsigned holding_at(double p, double q, int n, double m1, double m2, double m3,
                    double k, double l) {
    try {
        return gn_exponents(p, q, n, m1, m2, m3, k, l).holding;
    } catch (const Error&) {
        return 0;
    }
}

} // namespace

PbarResult find_pbar(double q, int n, double m1, double m2, double m3,
                     double k, double l, unsigned required,
                     const PbarOptions& options) {
    if (!(q > 1.0)) throw InvalidHypothesisParameter("q must exceed 1");
    if (!(k > 0.0) || !(l > 0.0)) throw InvalidHypothesisParameter("k, l must be positive");
    if (n < 1) throw InvalidHypothesisParameter("n must be a positive integer");
    if (!(options.dp > 0.0) || !(options.window > 0.0) || options.samples < 1) {
        throw InvalidHypothesisParameter("scan options must be positive");
    }

    unsigned needed = required & all_relations;
    if (l <= 1.0) {
        needed &= ~(rel_theta2 | rel_sigma1_theta2);
    }
    if (needed == 0) {
        throw InvalidHypothesisParameter("no applicable relations requested");
    }

    // Log-spaced offsets from dp to window: dense near the candidate so a
    // violation just beyond p_bar is caught, wide enough to cover the window.
    std::vector<double> offsets(static_cast<std::size_t>(options.samples));
    if (options.samples == 1) {
        offsets[0] = options.window;
    } else {
        const double ratio = options.window / options.dp;
        for (int i = 0; i < options.samples; ++i) {
            offsets[static_cast<std::size_t>(i)] =
                options.dp * std::pow(ratio, static_cast<double>(i) /
                                                 static_cast<double>(options.samples - 1));
        }
    }

    unsigned last_violated = 0;
    double last_violated_p = 0.0;
    const long max_j = static_cast<long>(std::floor((options.p_max - 1.0) / options.dp));
    for (long j = 1; j <= max_j; ++j) {
        const double pbar = 1.0 + static_cast<double>(j) * options.dp;
        unsigned holding = holding_at(pbar, q, n, m1, m2, m3, k, l);
        if ((holding & needed) != needed) {
            last_violated = needed & ~holding;
            last_violated_p = pbar;
            continue;
        }
        std::vector<double> certificate;
        certificate.reserve(offsets.size());
        bool ok = true;
        for (double off : offsets) {
            const double p = pbar + off;
            holding = holding_at(p, q, n, m1, m2, m3, k, l);
            if ((holding & needed) != needed) {
                last_violated = needed & ~holding;
                last_violated_p = p;
                ok = false;
                break;
            }
            certificate.push_back(p);
        }
        if (ok) {
            return {pbar, std::move(certificate)};
        }
    }

    std::ostringstream msg;
    msg << "no p-bar found on grid (1, " << options.p_max << "] with dp=" << options.dp;
    if (last_violated != 0) {
        for (unsigned bit = 1; bit <= rel_theta3; bit <<= 1) {
            if (last_violated & bit) {
                msg << "; relation " << relation_name(static_cast<Relation>(bit))
                    << " violated up to p=" << last_violated_p;
                break;
            }
        }
    }
    throw NotFoundWithinScan(msg.str());
}

} // namespace theory
} // namespace chemotax
