#pragma once

#include <map>
#include <variant>

#include "bzconv/lattice.hpp"
#include "bzconv/pwbasis.hpp"

namespace bzconv {

/// A function on the Brillouin zone, periodic under the reciprocal lattice,
/// given by its Fourier series f(q) = sum_R c_R e^{iq.R} over real-space
/// lattice vectors R = sum k_i a_i. Only the integer indices k matter: at a
/// point with fractional coordinates alpha, q.R = 2 pi k.alpha.
struct FiniteLatticeSeries {
  std::map<MillerIndex, Complex> coeffs;
};

/// c_R = kappa exp(-beta |k|_1); the series is summed in closed form (a
/// product of Poisson kernels).
struct ExponentialLatticeSeries {
  double kappa = 1.0;
  double beta = 0.5;
};

using LatticeSeries = std::variant<FiniteLatticeSeries, ExponentialLatticeSeries>;

/// f at fractional coordinates alpha.
Complex series_value(const LatticeSeries& series, const Vec3& alpha);
/// c_0, the Brillouin-zone average of f.
Complex series_mean(const LatticeSeries& series);

struct RiemannCheck {
  int L = 0;
  /// (1/L^3) sum over the L^3 grid points of f, minus the zone average.
  Complex lhs;
  /// sum over R != 0 of c_{LR}, summed coefficient by coefficient.
  Complex rhs;
};

/// Both sides of the exact aliasing identity for the uniform L^3 grid.
RiemannCheck riemann_check(const LatticeSeries& series, int L);

}  // namespace bzconv
