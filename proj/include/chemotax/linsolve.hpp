#pragma once

#include "chemotax/grid.hpp"

namespace chemotax {

struct LinearSolveOptions {
    double rel_tol = 1e-10;   // stop when ||r||_2 <= rel_tol*(||b||_2 + 1)
    int iter_cap_factor = 10; // iteration cap = factor * #cells
};

/// Applies (shift*I - lap_h) to z, with the zero-flux five/three point
/// Laplacian. Exposed so tests can measure operator residuals directly.
void apply_shifted_laplacian(const Grid& grid, double shift, const Field& z, Field& out);

/// Solves -lap z + eta*z = psi with zero-flux boundary (eta > 0), by
/// conjugate gradients. `guess` warm-starts the iteration when given.
Field solve_elliptic_local(const Grid& grid, double eta, const Field& psi,
                           const LinearSolveOptions& options = {},
                           const Field* guess = nullptr);

/// Solves -lap z = psi - mean(psi) with zero-flux boundary and mean(z) = 0.
/// The singular system is handled by projecting the right-hand side and the
/// iterate onto the zero-mean subspace every iteration.
Field solve_elliptic_nonlocal(const Grid& grid, const Field& psi,
                              const LinearSolveOptions& options = {},
                              const Field* guess = nullptr);

/// One implicit Euler step of z_t = lap z - eta*z + source:
/// (I/dt - lap + eta) z_new = z_prev/dt + source.
Field parabolic_signal_step(const Grid& grid, const Field& z_prev, double dt,
                            double eta, const Field& source,
                            const LinearSolveOptions& options = {});

} // namespace chemotax
