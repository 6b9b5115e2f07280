#include "chemotax/linsolve.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chemotax {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void project_zero_mean(std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

void apply_op(const Grid& grid, double shift, const std::vector<double>& z,
              std::vector<double>& out) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double ix2 = 1.0 / (grid.hx() * grid.hx());
    const bool two_d = grid.dimension() == 2;
    const double iy2 = two_d ? 1.0 / (grid.hy() * grid.hy()) : 0.0;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(nx) * j;
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = row + i;
            const double zc = z[c];
            double lap = 0.0;
            if (i > 0) lap += (z[c - 1] - zc) * ix2;
            if (i + 1 < nx) lap += (z[c + 1] - zc) * ix2;
            if (two_d) {
                if (j > 0) lap += (z[c - nx] - zc) * iy2;
                if (j + 1 < ny) lap += (z[c + nx] - zc) * iy2;
            }
            out[c] = shift * zc - lap;
        }
    }
}

// CG on (shift*I - lap_h) z = b. With zero_mean the operator is the pure
// Neumann Laplacian, SPD on the zero-mean subspace.
Field cg_solve(const Grid& grid, double shift, Field b, const LinearSolveOptions& options,
               const Field* guess, bool zero_mean) {
    const std::size_t cells = grid.cell_count();
    if (zero_mean) project_zero_mean(b.values);

    Field z = guess != nullptr ? *guess : Field(grid, 0.0);
    if (zero_mean) project_zero_mean(z.values);

    std::vector<double> r(cells);
    std::vector<double> ap(cells);
    apply_op(grid, shift, z.values, ap);
    for (std::size_t i = 0; i < cells; ++i) r[i] = b.values[i] - ap[i];
    if (zero_mean) project_zero_mean(r);

    const double tol = options.rel_tol * (std::sqrt(dot(b.values, b.values)) + 1.0);
    double rr = dot(r, r);
    if (std::sqrt(rr) <= tol) return z;

    std::vector<double> p = r;
    const long cap = options.iter_cap_factor * static_cast<long>(cells);
    for (long iter = 0; iter < cap; ++iter) {
        apply_op(grid, shift, p, ap);
        if (zero_mean) project_zero_mean(ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            throw SolverDiverged("conjugate gradients lost positive definiteness");
        }
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < cells; ++i) {
            z.values[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (zero_mean) {
            project_zero_mean(z.values);
            project_zero_mean(r);
        }
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= tol) return z;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < cells; ++i) p[i] = r[i] + beta * p[i];
    }
    throw SolverDiverged("iteration cap " + std::to_string(cap) + " hit");
}

} // namespace

void apply_shifted_laplacian(const Grid& grid, double shift, const Field& z, Field& out) {
    if (out.values.size() != z.values.size()) out = Field(grid);
    apply_op(grid, shift, z.values, out.values);
}

Field solve_elliptic_local(const Grid& grid, double eta, const Field& psi,
                           const LinearSolveOptions& options, const Field* guess) {
    if (!(eta > 0.0)) {
        throw NonPositiveEta("eta must be positive (use the nonlocal solver for eta=0)");
    }
    return cg_solve(grid, eta, psi, options, guess, false);
}

Field solve_elliptic_nonlocal(const Grid& grid, const Field& psi,
                              const LinearSolveOptions& options, const Field* guess) {
    return cg_solve(grid, 0.0, psi, options, guess, true);
}

Field parabolic_signal_step(const Grid& grid, const Field& z_prev, double dt,
                            double eta, const Field& source,
                            const LinearSolveOptions& options) {
    if (!(dt > 0.0)) throw NonPositiveParameter("dt must be positive");
    if (!(eta > 0.0)) throw NonPositiveEta("eta must be positive");
    Field rhs(grid);
    const double idt = 1.0 / dt;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs.values[i] = z_prev.values[i] * idt + source.values[i];
    }
    return cg_solve(grid, idt + eta, rhs, options, &z_prev, false);
}

} // namespace chemotax
