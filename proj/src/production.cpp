#include "chemotax/production.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chemotax {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw NonPositiveParameter(std::string(name) + " must be positive, got " +
                                   std::to_string(v));
    }
}

} // namespace

ProductionLaw ProductionLaw::prototype_attractant(double alpha, double k) {
    require_positive(alpha, "alpha");
    require_positive(k, "k");
    ProductionLaw law;
    law.role_ = LawRole::attractant;
    law.kind_ = LawKind::prototype;
    law.alpha_ = alpha;
    law.k_ = k;
    return law;
}

ProductionLaw ProductionLaw::prototype_repellent(double gamma0, double gamma1, double l) {
    require_positive(gamma0, "gamma0");
    require_positive(gamma1, "gamma1");
    require_positive(l, "l");
    if (gamma0 > gamma1) {
        throw NonPositiveParameter("gamma0 must not exceed gamma1");
    }
    ProductionLaw law;
    law.role_ = LawRole::repellent;
    law.kind_ = LawKind::prototype;
    law.gamma0_ = gamma0;
    law.gamma1_ = gamma1;
    law.l_ = l;
    return law;
}

ProductionLaw ProductionLaw::tabulated_attractant(std::vector<double> s,
                                                  std::vector<double> values,
                                                  double alpha, double k) {
    ProductionLaw law = prototype_attractant(alpha, k);
    law.kind_ = LawKind::tabulated;
    law.sample_s_ = std::move(s);
    law.sample_values_ = std::move(values);
    law.check_samples();
    return law;
}

ProductionLaw ProductionLaw::tabulated_repellent(std::vector<double> s,
                                                 std::vector<double> values,
                                                 double gamma0, double gamma1, double l) {
    ProductionLaw law = prototype_repellent(gamma0, gamma1, l);
    law.kind_ = LawKind::tabulated;
    law.sample_s_ = std::move(s);
    law.sample_values_ = std::move(values);
    law.check_samples();
    return law;
}

void ProductionLaw::check_samples() const {
    if (sample_s_.empty() || sample_s_.size() != sample_values_.size()) {
        throw EnvelopeViolated("tabulated law needs matching, nonempty sample arrays");
    }
    if (sample_s_.front() != 0.0) {
        throw EnvelopeViolated("tabulated law must start its samples at s=0");
    }
    for (std::size_t i = 0; i < sample_s_.size(); ++i) {
        const double s = sample_s_[i];
        const double g = sample_values_[i];
        if (!std::isfinite(s) || !std::isfinite(g)) {
            throw EnvelopeViolated("tabulated law has a non-finite sample");
        }
        if (i > 0 && !(sample_s_[i - 1] < s)) {
            throw EnvelopeViolated("tabulated sample abscissae must be strictly increasing");
        }
        const double lo = envelope_lower(s);
        const double hi = envelope_upper(s);
        const double slack = 1e-12 * (1.0 + std::abs(hi));
        if (g < lo - slack || g > hi + slack) {
            throw EnvelopeViolated("tabulated sample breaks the declared envelope at s=" +
                                   std::to_string(s) + ": value " + std::to_string(g) +
                                   " outside [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
        }
    }
}

double ProductionLaw::envelope_lower(double s) const {
    if (role_ == LawRole::attractant) {
        return 0.0;
    }
    return gamma0_ * std::pow(s + 1.0, l_);
}

double ProductionLaw::envelope_upper(double s) const {
    if (role_ == LawRole::attractant) {
        return alpha_ * std::pow(s + 1.0, k_);
    }
    return gamma1_ * std::pow(s + 1.0, l_);
}

double ProductionLaw::envelope_midpoint(double s) const {
    if (role_ == LawRole::attractant) {
        return 0.5 * alpha_ * std::pow(s + 1.0, k_);
    }
    return 0.5 * (gamma0_ + gamma1_) * std::pow(s + 1.0, l_);
}

double ProductionLaw::operator()(double s) const {
    if (!(s >= 0.0)) {
        throw NegativeArgument("production law evaluated at s=" + std::to_string(s));
    }
    if (kind_ == LawKind::prototype) {
        if (role_ == LawRole::attractant) {
            return alpha_ * std::pow(s + 1.0, k_);
        }
        // Exact gamma*(s+1)^l when the two bounds agree, midpoint otherwise.
        return envelope_midpoint(s);
    }
    double value;
    if (s >= sample_s_.back()) {
        value = envelope_midpoint(s);
    } else {
        auto it = std::upper_bound(sample_s_.begin(), sample_s_.end(), s);
        const std::size_t hi = static_cast<std::size_t>(it - sample_s_.begin());
        const std::size_t lo = hi - 1;
        const double t = (s - sample_s_[lo]) / (sample_s_[hi] - sample_s_[lo]);
        value = (1.0 - t) * sample_values_[lo] + t * sample_values_[hi];
    }
    // Interpolation between in-envelope samples can still exit a curved
    // envelope; clamp so evaluation always honors the declared bounds.
    return std::clamp(value, envelope_lower(s), envelope_upper(s));
}

} // namespace chemotax
