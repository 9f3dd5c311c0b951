#pragma once

#include "bzconv/lattice.hpp"

namespace bzconv {

/// Explicit constants of the exponential-convergence bounds for a gapped
/// periodic Hamiltonian -1/2 Laplacian + V.
///
/// Quadrature error <= C0 sup_{S_A} |f| e^{-alpha L} for functions analytic on
/// the strip S_A = R^3 + i[-A, A]^3; kinetic-energy error <= C0 C5 e^{-alpha L};
/// density error <= C0 C6 e^{-alpha L}.
struct RateBound {
  double A = 0.0;       ///< strip half-width
  double alpha = 0.0;   ///< decay rate per unit L
  double C0 = 0.0;      ///< Riemann-sum prefactor
  double C1 = 0.0;      ///< resolvent bound on the real Brillouin zone
  double C2 = 0.0;      ///< resolvent bound on the complex strip
  double C3 = 0.0;      ///< bound on (1 - Laplacian) gamma_z
  double C4 = 0.0;      ///< trace-norm bound on gamma_z
  double C5 = 0.0;      ///< kinetic integrand bound
  double C6 = 0.0;      ///< density integrand bound
  double lattice_sum = 0.0;  ///< sum over R* of (1 + |k|^2)^-2

  // Inputs.
  double v_inf = 0.0;
  double gap = 0.0;
  double fermi = 0.0;
  double bz_radius = 0.0;
  double max_reciprocal_norm = 0.0;
};

/// alpha = (2/3) pi A / |a3*|, the decay rate of the Riemann-sum bound for a
/// strip of half-width A (|a3*| the longest reciprocal basis vector).
double strip_decay_rate(double A, double max_reciprocal_norm);

/// C0 = 2 (3 + e^{-2 alpha}) / (1 - e^{-alpha})^3.
double riemann_prefactor(double alpha);

/// Throws DomainError when gap <= 0 or v_inf < 0.
RateBound theoretical_rate(const Lattice& lattice, double v_inf, double gap, double fermi);

/// sum_{k in R*} (1 + |k|^2)^-2, to relative accuracy `rel_tol`.
double inverse_square_lattice_sum(const ReciprocalLattice& rlat, double rel_tol = 1e-12);

}  // namespace bzconv
