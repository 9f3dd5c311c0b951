#include "bzconv/study.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "bzconv/bloch.hpp"
#include "bzconv/errors.hpp"
#include "bzconv/pseudopotential.hpp"

namespace bzconv {

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto at_grid(int L, F&& run) {
  const std::string where = "grid L=" + std::to_string(L) + ": ";
  try {
    return run();
  } catch (const MetallicError& e) {
    throw MetallicError(where + e.what(), e.gap());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.iterations(), e.last_residual());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  }
}

}  // namespace

StudyResult run_study(const PlaneWaveBasis& basis, const PeriodicFunction& vlin,
                      const StudyConfig& config, const std::function<void(const StudyRow&)>& on_row) {
  if (config.sizes.empty()) throw ConfigError("study: no grid sizes given");
  const std::set<int> sizes(config.sizes.begin(), config.sizes.end());
  if (*sizes.begin() < 1) throw ConfigError("study: grid sizes must be positive");
  if (config.reference < *sizes.rbegin()) {
    throw ConfigError("study: reference grid must be at least the largest grid size");
  }

  const ReciprocalLattice& rlat = basis.rlat();
  SCFConfig linear = config.scf;
  linear.hartree = false;
  SCFConfig selfconsistent = config.scf;
  selfconsistent.hartree = true;

  const auto start = Clock::now();
  const SCFResult linear_ref = at_grid(config.reference, [&] {
    return scf(basis, kgrid(rlat, config.reference), vlin, linear, uniform_density(rlat, config.scf.nocc));
  });

  StudyResult result{{}, linear_ref, vlin, 0.0};
  const bool rhf = config.model == Model::kRhf;
  if (rhf) {
    result.vext = rhf_pseudopotential(vlin, linear_ref.density);
    result.reference = at_grid(config.reference, [&] {
      return scf(basis, kgrid(rlat, config.reference), result.vext, selfconsistent, linear_ref.density);
    });
  }
  result.reference_wall_time = std::chrono::duration<double>(Clock::now() - start).count();

  for (int L : sizes) {
    const auto t0 = Clock::now();
    StudyRow row;
    row.L = L;
    if (L == config.reference) {
      row.energy = result.reference.energy_per_cell;
      row.scf_iterations = result.reference.iterations;
      row.scf_residual = result.reference.residual;
    } else {
      const SCFResult run = at_grid(L, [&] {
        return rhf ? scf(basis, kgrid(rlat, L), result.vext, selfconsistent, linear_ref.density)
                   : scf(basis, kgrid(rlat, L), vlin, linear, uniform_density(rlat, config.scf.nocc));
      });
      row.energy = run.energy_per_cell;
      row.energy_error = std::abs(run.energy_per_cell - result.reference.energy_per_cell);
      row.density_error_inf = sup_norm(run.density - result.reference.density);
      row.scf_iterations = run.iterations;
      row.scf_residual = run.residual;
    }
    row.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    result.rows.push_back(row);
    if (on_row) on_row(row);
  }
  return result;
}

}  // namespace bzconv
