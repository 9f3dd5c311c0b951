#include "bzconv/rhf.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include "bzconv/coulomb.hpp"
#include "bzconv/errors.hpp"

namespace bzconv {

void SCFConfig::validate() const {
  if (nocc < 1) throw ConfigError("scf: nocc must be positive");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw ConfigError("scf: mixing must lie in (0, 1]");
  if (!(tol_density > 0.0)) throw ConfigError("scf: tol_density must be positive");
  if (max_iter < 1) throw ConfigError("scf: max_iter must be at least 1");
  if (!(gap_tolerance >= 0.0)) throw ConfigError("scf: gap_tolerance must be nonnegative");
  if (anderson_depth < 0) throw ConfigError("scf: anderson_depth must be nonnegative");
}

PeriodicFunction uniform_density(const ReciprocalLattice& rlat, int nocc) {
  PeriodicFunction rho(rlat, true);
  rho.set({0, 0, 0}, nocc / rlat.cell_volume());
  return rho;
}

namespace {

PeriodicFunction density_with_plan(const AutocorrelationPlan& plan, const PlaneWaveBasis& basis,
                                   std::span<const FiberSolution> solutions, int nocc) {
  if (solutions.empty()) throw DomainError("density_from_grid: no fiber solutions");
  std::vector<Complex> acc;
  for (const FiberSolution& s : solutions) {
    if (s.eigenvectors.cols() < nocc) throw DomainError("density_from_grid: too few orbitals");
    for (int n = 0; n < nocc; ++n) {
      const auto col = s.eigenvectors.col(n);
      plan.accumulate(std::span<const Complex>(col.data(), static_cast<std::size_t>(col.size())),
                      1.0, acc);
    }
  }
  const double scale = 1.0 / (static_cast<double>(solutions.size()) * basis.rlat().cell_volume());
  return plan.finish(acc, scale);
}

}  // namespace

PeriodicFunction density_from_grid(const PlaneWaveBasis& basis,
                                   std::span<const FiberSolution> solutions, int nocc) {
  const AutocorrelationPlan plan(basis);
  return density_with_plan(plan, basis, solutions, nocc);
}

double kinetic_energy_per_cell(const PlaneWaveBasis& basis,
                               std::span<const FiberSolution> solutions, int nocc) {
  if (solutions.empty()) throw DomainError("kinetic_energy_per_cell: no fiber solutions");
  double total = 0.0;
  for (const FiberSolution& s : solutions) {
    for (int n = 0; n < nocc; ++n) {
      for (std::size_t g = 0; g < basis.size(); ++g) {
        total += (basis.gvec(g) + s.q).squaredNorm() *
                 std::norm(s.eigenvectors(static_cast<Eigen::Index>(g), n));
      }
    }
  }
  return total / static_cast<double>(solutions.size());
}

double cell_integral(const PeriodicFunction& f, const PeriodicFunction& g) {
  const bool f_smaller = f.coeffs().size() <= g.coeffs().size();
  const PeriodicFunction& small = f_smaller ? f : g;
  const PeriodicFunction& large = f_smaller ? g : f;
  double sum = 0.0;
  for (const auto& [m, c] : small.coeffs()) {
    sum += (c * std::conj(large.coefficient(m))).real();
  }
  return f.rlat().cell_volume() * sum;
}

double total_energy(const PlaneWaveBasis& basis, std::span<const FiberSolution> solutions,
                    const PeriodicFunction& density, const PeriodicFunction& vext, int nocc,
                    bool include_hartree) {
  double e = 0.5 * kinetic_energy_per_cell(basis, solutions, nocc) + cell_integral(vext, density);
  if (include_hartree) {
    const PeriodicFunction fluct = density.without_mean();
    e += 0.5 * coulomb_energy(fluct, fluct);
  }
  return e;
}

PeriodicFunction mean_field_potential(const PeriodicFunction& vext, const PeriodicFunction& rho) {
  return vext + hartree(rho.without_mean());
}

namespace {

/// Anderson/Pulay extrapolation on the fixed-point residual F = rho_out - rho.
class AndersonMixer {
 public:
  AndersonMixer(int depth, double beta) : depth_(depth), beta_(beta) {}

  PeriodicFunction next(const PeriodicFunction& rho, const PeriodicFunction& rho_out) {
    PeriodicFunction f = rho_out - rho;
    if (depth_ == 0 || !last_) {
      remember(rho, f);
      return rho + beta_ * f;
    }
    drho_.push_back(rho - last_->first);
    df_.push_back(f - last_->second);
    if (static_cast<int>(df_.size()) > depth_) {
      drho_.pop_front();
      df_.pop_front();
    }
    remember(rho, f);

    const auto m = static_cast<Eigen::Index>(df_.size());
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) a(i, j) = cell_integral(df_[i], df_[j]);
      b[i] = cell_integral(df_[i], f);
    }
    const Eigen::VectorXd gamma = a.completeOrthogonalDecomposition().solve(b);

    PeriodicFunction rho_bar = rho;
    PeriodicFunction f_bar = f;
    for (Eigen::Index i = 0; i < m; ++i) {
      rho_bar -= gamma[i] * drho_[i];
      f_bar -= gamma[i] * df_[i];
    }
    return rho_bar + beta_ * f_bar;
  }

 private:
  void remember(const PeriodicFunction& rho, const PeriodicFunction& f) {
    last_.emplace(rho, f);
  }

  int depth_;
  double beta_;
  std::optional<std::pair<PeriodicFunction, PeriodicFunction>> last_;
  std::deque<PeriodicFunction> drho_;
  std::deque<PeriodicFunction> df_;
};

}  // namespace

SCFResult scf(const PlaneWaveBasis& basis, const KGrid& grid, const PeriodicFunction& vext,
              const SCFConfig& config, const PeriodicFunction& rho_init,
              const std::function<void(const SCFIteration&)>& on_iteration) {
  config.validate();
  const double volume = basis.rlat().cell_volume();
  const double charge0 = rho_init.mean().real() * volume;
  if (std::abs(charge0 - config.nocc) > 1e-8 * config.nocc) {
    std::ostringstream msg;
    msg << "scf: initial density integrates to " << charge0 << ", expected " << config.nocc;
    throw DomainError(msg.str());
  }

  const AutocorrelationPlan plan(basis);
  AndersonMixer mixer(config.anderson_depth, config.mixing);
  PeriodicFunction rho = rho_init;
  SCFResult result{rho_init, 0.0, 0.0, 0.0, 0, false, 0.0, vext, {}, {}};

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    PeriodicFunction potential = config.hartree ? mean_field_potential(vext, rho) : vext;
    const FiberHamiltonian hamiltonian(basis, potential);
    std::vector<FiberSolution> sols = solve_fibers(grid, hamiltonian, config.nocc, config.solver);
    const FermiGap fg = fermi_and_gap(sols, config.nocc, config.gap_tolerance);
    // With the gap open, filling the nocc L^3 lowest states of the grid is the
    // same as filling nocc bands on every fiber.
    PeriodicFunction rho_out = density_with_plan(plan, basis, sols, config.nocc);
    const double energy = total_energy(basis, sols, rho_out, vext, config.nocc, config.hartree);

    double residual = 0.0;
    PeriodicFunction rho_next = rho_out;
    if (config.hartree) {
      rho_next = mixer.next(rho, rho_out);
      residual = sup_norm(rho_next - rho);
    }

    SCFIteration log{iter, residual, energy, fg.gap, rho_next.mean().real() * volume};
    result.history.push_back(log);
    if (on_iteration) on_iteration(log);

    if (!config.hartree || residual < config.tol_density) {
      result.density = std::move(rho_out);
      result.energy_per_cell = energy;
      result.fermi = fg.fermi;
      result.gap = fg.gap;
      result.iterations = iter;
      result.converged = true;
      result.residual = residual;
      result.potential = std::move(potential);
      result.fiber_solutions = std::move(sols);
      return result;
    }
    rho = std::move(rho_next);
    result.residual = residual;
  }
  std::ostringstream msg;
  msg << "scf did not converge in " << config.max_iter << " iterations (last residual "
      << result.residual << ", tolerance " << config.tol_density << ")";
  throw ConvergenceError(msg.str(), config.max_iter, result.residual);
}

}  // namespace bzconv
