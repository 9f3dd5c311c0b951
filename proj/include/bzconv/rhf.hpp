#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bzconv/bloch.hpp"
#include "bzconv/pwbasis.hpp"

namespace bzconv {

struct SCFConfig {
  /// Electron pairs per unit cell.
  int nocc = 4;
  /// Linear mixing weight beta: rho_next = (1 - beta) rho + beta rho_out.
  double mixing = 0.5;
  /// Stop when the L-infinity change of the density between iterates drops below this.
  double tol_density = 1e-7;
  int max_iter = 100;
  double gap_tolerance = kDefaultGapTolerance;
  /// false: the mean field is vext alone (linear model); one diagonalization.
  bool hartree = true;
  /// Anderson acceleration history length; 0 keeps plain linear mixing.
  int anderson_depth = 0;
  FiberSolverOptions solver;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct SCFIteration {
  int iter = 0;
  double residual_linf = 0.0;
  double energy = 0.0;
  double gap = 0.0;
  /// c_0 |cell| of the mixed density; equals nocc.
  double charge = 0.0;
};

struct SCFResult {
  PeriodicFunction density;
  double energy_per_cell = 0.0;
  double fermi = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  /// Mean-field potential of the final diagonalization.
  PeriodicFunction potential;
  std::vector<FiberSolution> fiber_solutions;
  std::vector<SCFIteration> history;
};

/// The constant density nocc / |cell|.
PeriodicFunction uniform_density(const ReciprocalLattice& rlat, int nocc);

/// rho = (1/L^3) sum_Q sum_{n < nocc} |u_{n,Q}|^2 / |cell|, accumulated in grid order.
PeriodicFunction density_from_grid(const PlaneWaveBasis& basis,
                                   std::span<const FiberSolution> solutions, int nocc);

/// (1/L^3) sum_Q sum_{n < nocc} sum_G |G + Q|^2 |c_{n,Q,G}|^2. No factor 1/2.
double kinetic_energy_per_cell(const PlaneWaveBasis& basis,
                               std::span<const FiberSolution> solutions, int nocc);

/// Integral over the cell of f g for real-valued f, g.
double cell_integral(const PeriodicFunction& f, const PeriodicFunction& g);

/// Energy per unit cell: 1/2 kinetic + integral(vext rho) + 1/2 D(rho - mean, rho - mean).
/// The Coulomb term is skipped when include_hartree is false.
double total_energy(const PlaneWaveBasis& basis, std::span<const FiberSolution> solutions,
                    const PeriodicFunction& density, const PeriodicFunction& vext, int nocc,
                    bool include_hartree = true);

/// Mean-field potential vext + hartree(rho - mean).
PeriodicFunction mean_field_potential(const PeriodicFunction& vext, const PeriodicFunction& rho);

/// Self-consistent field loop on a k-grid. Throws MetallicError if the gap
/// closes and ConvergenceError (with the last residual) after max_iter.
SCFResult scf(const PlaneWaveBasis& basis, const KGrid& grid, const PeriodicFunction& vext,
              const SCFConfig& config, const PeriodicFunction& rho_init,
              const std::function<void(const SCFIteration&)>& on_iteration = {});

}  // namespace bzconv
