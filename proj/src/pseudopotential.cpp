#include "bzconv/pseudopotential.hpp"

#include <cmath>
#include <numbers>

#include "bzconv/coulomb.hpp"
#include "bzconv/errors.hpp"

namespace bzconv {

FormFactorTable FormFactorTable::silicon() { return {{{3, -0.105}, {8, 0.02}, {11, 0.04}}}; }

PeriodicFunction cohen_bergstresser(const Lattice& lattice, double a, int kmax2,
                                    const FormFactorTable& table) {
  if (!(a > 0.0)) throw DomainError("lattice constant must be positive");
  if (kmax2 < table.max_shell()) throw DomainError("kmax2 excludes shells of the form factor table");

  const ReciprocalLattice rlat = reciprocal(lattice);
  const double unit = 2.0 * std::numbers::pi / a;
  const double kmax = std::sqrt(static_cast<double>(kmax2)) * unit;
  const int mmax = static_cast<int>(std::ceil(kmax / rlat.min_singular_value()));

  PeriodicFunction v(rlat, true);
  for (int m1 = -mmax; m1 <= mmax; ++m1) {
    for (int m2 = -mmax; m2 <= mmax; ++m2) {
      for (int m3 = -mmax; m3 <= mmax; ++m3) {
        const Vec3 k = rlat.vector({m1, m2, m3});
        const double shell_exact = k.squaredNorm() / (unit * unit);
        const long shell = std::lround(shell_exact);
        if (shell > kmax2 || std::abs(shell_exact - static_cast<double>(shell)) > 1e-8) continue;
        const double s = table(static_cast<int>(shell));
        if (s == 0.0) continue;
        v.set({m1, m2, m3}, s * std::cos(a * (k[0] + k[1] + k[2]) / 8.0));
      }
    }
  }
  return v;
}

PeriodicFunction rhf_pseudopotential(const PeriodicFunction& vlin, const PeriodicFunction& rho_ref) {
  if (!rho_ref.real_valued()) throw DomainError("reference density must be real-valued");
  return vlin - hartree(rho_ref.without_mean());
}

}  // namespace bzconv
