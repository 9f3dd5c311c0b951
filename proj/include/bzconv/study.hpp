#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bzconv/pwbasis.hpp"
#include "bzconv/rhf.hpp"

namespace bzconv {

enum class Model { kLinear, kRhf };

struct StudyConfig {
  Model model = Model::kLinear;
  std::vector<int> sizes;
  int reference = 0;
  /// Used for every run; `hartree` is set from `model`.
  SCFConfig scf;
};

struct StudyRow {
  int L = 0;
  double energy = 0.0;            ///< Hartree per cell
  double energy_error = 0.0;      ///< |E_L - E_ref|, Hartree
  double density_error_inf = 0.0; ///< sup |rho_L - rho_ref|, Bohr^-3
  double wall_time = 0.0;         ///< seconds
  int scf_iterations = 0;
  double scf_residual = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;  ///< ascending L
  SCFResult reference;
  /// The external potential of the runs: vlin, or the rHF pseudopotential.
  PeriodicFunction vext;
  double reference_wall_time = 0.0;
};

/// Runs the model on every grid size and compares each run with a run on the
/// reference grid. In rHF mode the external potential is vlin minus the
/// Hartree potential of the linear density on the reference grid, and every
/// SCF starts from that density.
///
/// Requires reference >= max(sizes); a size equal to the reference reuses the
/// reference run (errors exactly 0). Inner failures are rethrown with the
/// failing L in the message and their original type.
StudyResult run_study(const PlaneWaveBasis& basis, const PeriodicFunction& vlin,
                      const StudyConfig& config,
                      const std::function<void(const StudyRow&)>& on_row = {});

}  // namespace bzconv
