#pragma once

#include <iosfwd>

#include "config.hpp"

namespace bzconv::cli {

/// Eigenvalues at each configured q: "q1,q2,q3,band,energy_ha,energy_ev".
void cmd_bands(const RunConfig& config, std::ostream& out);

/// SCF on the L^3 grid: "iter,residual_linf,energy_ha,gap_ha" rows, a summary
/// in comment lines, and the density table when a checkpoint path is set.
void cmd_scf(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Convergence study: one CSV row per grid size, then fit comment lines.
void cmd_study(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Explicit rate constants from the linear model on the L^3 grid.
void cmd_rate_bound(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Aliasing identity for the exponential lattice family, L = 1..max_L.
void cmd_riemann(const RunConfig& config, std::ostream& out);

}  // namespace bzconv::cli
