#include "chemotax/grid.hpp"

#include <cmath>

namespace chemotax {

Grid Grid::build(const DomainSpec& domain) {
    validate_domain(domain);
    Grid g;
    g.dim_ = domain.dimension;
    g.nx_ = domain.cells[0];
    g.lenx_ = domain.lengths[0];
    g.hx_ = domain.lengths[0] / domain.cells[0];
    if (domain.dimension == 2) {
        g.ny_ = domain.cells[1];
        g.leny_ = domain.lengths[1];
        g.hy_ = domain.lengths[1] / domain.cells[1];
    }
    return g;
}

bool all_finite(const Field& f) {
    for (double v : f.values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double mean(const Field& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum / static_cast<double>(f.values.size());
}

} // namespace chemotax
