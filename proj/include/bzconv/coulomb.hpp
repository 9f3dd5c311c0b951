#pragma once

#include "bzconv/pwbasis.hpp"

namespace bzconv {

inline constexpr double kDefaultNeutralityTolerance = 1e-10;

/// Periodic Coulomb potential of a neutral charge distribution,
/// (f * G)(x) with G the zero-mean periodic Green kernel of -Laplacian/(4 pi).
/// Output coefficients are 4 pi c_k(f) / |k|^2 for k != 0 and 0 at k = 0.
/// Throws NeutralityError when |c_0(f)| exceeds `neutrality_tolerance`.
PeriodicFunction hartree(const PeriodicFunction& f,
                         double neutrality_tolerance = kDefaultNeutralityTolerance);

/// D(f, g) = integral over the cell of (f * G) g
///         = 4 pi |cell| sum_{k != 0} conj(c_k(g)) c_k(f) / |k|^2.
/// Both arguments must be neutral and real-valued; the result is real.
double coulomb_energy(const PeriodicFunction& f, const PeriodicFunction& g,
                      double neutrality_tolerance = kDefaultNeutralityTolerance);

}  // namespace bzconv
