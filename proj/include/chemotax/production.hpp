#pragma once

#include <vector>

#include "chemotax/errors.hpp"

namespace chemotax {

enum class LawRole { attractant, repellent };
enum class LawKind { prototype, tabulated };

/// Signal production rate as a function of the cell density s >= 0.
///
/// Every law carries envelope parameters. An attractant rate f satisfies
/// 0 <= f(s) <= alpha*(s+1)^k; a repellent rate g satisfies
/// gamma0*(s+1)^l <= g(s) <= gamma1*(s+1)^l. Prototype laws evaluate the
/// envelope itself (midpoint when gamma0 < gamma1); tabulated laws
/// interpolate user samples linearly and are clamped into the envelope,
/// falling back to the envelope midpoint beyond the last sample.
class ProductionLaw {
public:
    static ProductionLaw prototype_attractant(double alpha, double k);
    static ProductionLaw prototype_repellent(double gamma0, double gamma1, double l);

    // Samples are (s_i, value_i) with s ascending from 0. Construction fails
    // with EnvelopeViolated if any sample breaks the declared envelope.
    static ProductionLaw tabulated_attractant(std::vector<double> s,
                                              std::vector<double> values,
                                              double alpha, double k);
    static ProductionLaw tabulated_repellent(std::vector<double> s,
                                             std::vector<double> values,
                                             double gamma0, double gamma1, double l);

    /// Evaluate the rate at density s; throws NegativeArgument for s < 0.
    double operator()(double s) const;

    double envelope_lower(double s) const;
    double envelope_upper(double s) const;
    double envelope_midpoint(double s) const;

    LawRole role() const { return role_; }
    LawKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double k() const { return k_; }
    double gamma0() const { return gamma0_; }
    double gamma1() const { return gamma1_; }
    double l() const { return l_; }

    bool operator==(const ProductionLaw&) const = default;

private:
    ProductionLaw() = default;

    void check_samples() const;

    LawRole role_ = LawRole::attractant;
    LawKind kind_ = LawKind::prototype;
    double alpha_ = 0.0;
    double k_ = 0.0;
    double gamma0_ = 0.0;
    double gamma1_ = 0.0;
    double l_ = 0.0;
    std::vector<double> sample_s_;
    std::vector<double> sample_values_;
};

} // namespace chemotax
