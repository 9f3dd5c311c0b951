#include "bzconv/coulomb.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr MillerIndex kZero{0, 0, 0};

void require_neutral(const PeriodicFunction& f, double tol) {
  const double c0 = std::abs(f.mean());
  if (c0 > tol) {
    std::ostringstream msg;
    msg << "charge distribution is not neutral: |c_0| = " << c0 << " exceeds " << tol;
    throw NeutralityError(msg.str());
  }
}

}  // namespace

PeriodicFunction hartree(const PeriodicFunction& f, double neutrality_tolerance) {
  require_neutral(f, neutrality_tolerance);
  PeriodicFunction out(f.rlat(), f.real_valued());
  for (const auto& [m, c] : f.coeffs()) {
    if (m == kZero) continue;
    out.set(m, kFourPi * c / f.rlat().vector(m).squaredNorm());
  }
  return out;
}

double coulomb_energy(const PeriodicFunction& f, const PeriodicFunction& g,
                      double neutrality_tolerance) {
  require_neutral(f, neutrality_tolerance);
  require_neutral(g, neutrality_tolerance);
  if (!(f.rlat() == g.rlat())) throw DomainError("periodic functions on different lattices");

  // Iterate the smaller support, look up in the larger one.
  const bool f_smaller = f.coeffs().size() <= g.coeffs().size();
  const PeriodicFunction& small = f_smaller ? f : g;
  const PeriodicFunction& large = f_smaller ? g : f;

  double sum = 0.0;
  for (const auto& [m, cs] : small.coeffs()) {
    if (m == kZero) continue;
    const Complex cl = large.coefficient(m);
    if (cl == Complex{}) continue;
    // conj(c_k(g)) c_k(f); the total is real, so either ordering gives the same real part.
    sum += (std::conj(cs) * cl).real() / f.rlat().vector(m).squaredNorm();
  }
  return kFourPi * f.rlat().cell_volume() * sum;
}

}  // namespace bzconv
