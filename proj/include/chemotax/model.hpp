#pragma once

#include <array>
#include <string>
#include <vector>

#include "chemotax/errors.hpp"
#include "chemotax/production.hpp"

namespace chemotax {

enum class Variant { local, nonlocal };

/// Full parameterization of the attraction-repulsion system.
///
/// The cell equation is
///   u_t = div( (u+1)^(m1-1) grad u - chi*u*(u+1)^(m2-1) grad v
///              + xi*u*(u+1)^(m3-1) grad w ) + lambda*u - mu*u^r,
/// with signal equations either local (tau*v_t = lap v - beta*v + f(u),
/// tau*w_t = lap w - delta*w + g(u)) or nonlocal (tau = 0,
/// 0 = lap v + f(u) - mean(f(u)), v and w of zero mean).
struct ModelSpec {
    Variant variant = Variant::local;
    int tau = 0; // 0: signals elliptic, 1: signals parabolic (local only)
    double chi = 1.0;
    double xi = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    double r = 2.0;
    double m1 = 1.0;
    double m2 = 1.0;
    double m3 = 1.0;
    double beta = 1.0;  // local variant only
    double delta = 1.0; // local variant only
    ProductionLaw attractant = ProductionLaw::prototype_attractant(1.0, 1.0);
    ProductionLaw repellent = ProductionLaw::prototype_repellent(1.0, 1.0, 1.0);
    int n = 1; // spatial dimension (1 or 2 for simulation, any >=1 for theory)
    // lambda=0 or mu=0 is admitted only with this flag (conservation oracles).
    bool test_mode = false;

    bool operator==(const ModelSpec&) const = default;
};

/// Returns one message per violated invariant; empty means admissible.
std::vector<std::string> validate(const ModelSpec& spec);

/// Immutable, admissibility-checked model. Construction throws InvalidModel
/// carrying the full violation list. Safe to share across workers.
class ValidatedModel {
public:
    explicit ValidatedModel(const ModelSpec& spec);

    const ModelSpec& spec() const { return spec_; }

    // Validation is idempotent.
    const ValidatedModel& validated() const { return *this; }

    bool operator==(const ValidatedModel&) const = default;

private:
    ModelSpec spec_;
};

inline ValidatedModel validate_model(const ModelSpec& spec) { return ValidatedModel(spec); }
inline const ValidatedModel& validate_model(const ValidatedModel& m) { return m.validated(); }

/// Argmax and maximum of the logistic source s -> lambda*s - mu*s^r on s>=0.
struct LogisticExtremum {
    double u_max;  // argmax (lambda/(r*mu))^(1/(r-1))
    double peak;   // lambda*u_max - mu*u_max^r, positive
};

LogisticExtremum logistic_extremum(double lambda, double mu, double r);

/// Rectangular domain: interval (1D) or axis-aligned rectangle (2D),
/// uniformly partitioned into cells. Zero-flux finite volumes are exact here.
struct DomainSpec {
    int dimension = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<int, 2> cells{16, 16};

    double measure() const {
        return dimension == 2 ? lengths[0] * lengths[1] : lengths[0];
    }

    bool operator==(const DomainSpec&) const = default;
};

/// Throws TooFewCells / NonPositiveParameter on bad domain data.
void validate_domain(const DomainSpec& domain);

} // namespace chemotax
