#include "chemotax/model.hpp"

#include <cmath>

namespace chemotax {

std::vector<std::string> validate(const ModelSpec& spec) {
    std::vector<std::string> issues;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back(msg);
    };

    check(spec.tau == 0 || spec.tau == 1, "tau: must be 0 or 1");
    if (spec.variant == Variant::nonlocal) {
        check(spec.tau == 0, "tau: nonlocal requires tau=0");
    }
    // Zeroed coefficients are conservation-oracle territory.
    auto check_coefficient = [&](double v, const std::string& name) {
        if (!std::isfinite(v) || v < 0.0) {
            issues.push_back(name + ": must be nonnegative");
        } else if (v == 0.0 && !spec.test_mode) {
            issues.push_back(name + ": " + name + "=0 requires test_mode");
        }
    };
    check_coefficient(spec.chi, "chi");
    check_coefficient(spec.xi, "xi");
    check_coefficient(spec.lambda, "lambda");
    check_coefficient(spec.mu, "mu");
    check(std::isfinite(spec.r) && spec.r > 1.0, "r: r>1 required");
    check(std::isfinite(spec.m1), "m1: must be finite");
    check(std::isfinite(spec.m2), "m2: must be finite");
    check(std::isfinite(spec.m3), "m3: must be finite");
    if (spec.variant == Variant::local) {
        check(std::isfinite(spec.beta) && spec.beta > 0.0, "beta: must be positive");
        check(std::isfinite(spec.delta) && spec.delta > 0.0, "delta: must be positive");
    }
    check(spec.attractant.role() == LawRole::attractant,
          "attractant: law has the wrong role");
    check(spec.repellent.role() == LawRole::repellent,
          "repellent: law has the wrong role");
    check(spec.n >= 1, "n: dimension must be a positive integer");
    return issues;
}

ValidatedModel::ValidatedModel(const ModelSpec& spec) : spec_(spec) {
    auto issues = validate(spec);
    if (!issues.empty()) {
        throw InvalidModel(std::move(issues));
    }
}

LogisticExtremum logistic_extremum(double lambda, double mu, double r) {
    if (!(lambda > 0.0)) throw NonPositiveParameter("lambda must be positive");
    if (!(mu > 0.0)) throw NonPositiveParameter("mu must be positive");
    if (!(r > 1.0)) throw RNotGreaterThanOne("r must exceed 1");
    const double u_max = std::pow(lambda / (r * mu), 1.0 / (r - 1.0));
    const double peak = lambda * u_max - mu * std::pow(u_max, r);
    return {u_max, peak};
}

void validate_domain(const DomainSpec& domain) {
    if (domain.dimension != 1 && domain.dimension != 2) {
        throw NonPositiveParameter("domain dimension must be 1 or 2");
    }
    for (int axis = 0; axis < domain.dimension; ++axis) {
        if (!(domain.lengths[axis] > 0.0) || !std::isfinite(domain.lengths[axis])) {
            throw NonPositiveParameter("domain length must be positive");
        }
        if (domain.cells[axis] < 4) {
            throw TooFewCells("at least 4 cells per axis required");
        }
    }
}

} // namespace chemotax
