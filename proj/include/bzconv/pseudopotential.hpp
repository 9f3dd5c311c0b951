#pragma once

#include <map>

#include "bzconv/lattice.hpp"
#include "bzconv/pwbasis.hpp"

namespace bzconv {

/// Empirical form factors keyed by |k|^2 in units of (2 pi / a)^2, in Hartree.
struct FormFactorTable {
  std::map<int, double> entries;

  /// Diamond silicon: -0.105 (|k|^2 = 3), 0.02 (8), 0.04 (11).
  static FormFactorTable silicon();

  double operator()(int shell) const {
    auto it = entries.find(shell);
    return it == entries.end() ? 0.0 : it->second;
  }
  int max_shell() const { return entries.empty() ? 0 : entries.rbegin()->first; }
};

/// Local empirical pseudopotential of the diamond structure,
/// V_k = S(|k|^2) cos(a (k_1 + k_2 + k_3) / 8), on reciprocal vectors with
/// |k|^2 <= kmax2 (2 pi / a)^2. Only shells carrying a nonzero form factor
/// are stored.
PeriodicFunction cohen_bergstresser(const Lattice& lattice, double a, int kmax2 = 11,
                                    const FormFactorTable& table = FormFactorTable::silicon());

/// Pseudopotential for the self-consistent model: vlin minus the Hartree
/// potential of rho_ref (taken relative to its own mean), so that rho_ref's
/// mean-field Hamiltonian equals the linear one.
PeriodicFunction rhf_pseudopotential(const PeriodicFunction& vlin, const PeriodicFunction& rho_ref);

}  // namespace bzconv
