#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "bzconv/bloch.hpp"
#include "bzconv/errors.hpp"
#include "bzconv/fit.hpp"
#include "bzconv/pseudopotential.hpp"
#include "bzconv/rate_bound.hpp"
#include "bzconv/riemann.hpp"

namespace bzconv::cli {

namespace {

struct System {
  Lattice lattice;
  ReciprocalLattice rlat;
  PlaneWaveBasis basis;
  PeriodicFunction vlin;
};

System build_model(const RunConfig& c) {
  const Lattice lattice = make_lattice(c);
  const ReciprocalLattice rlat = reciprocal(lattice);
  PlaneWaveBasis basis = build_basis(rlat, c.ecutoff);
  PeriodicFunction vlin = c.potential == PotentialKind::kZero
                              ? PeriodicFunction(rlat, true)
                              : cohen_bergstresser(lattice, c.lattice_constant, c.kmax2);
  return {lattice, rlat, std::move(basis), std::move(vlin)};
}

SCFConfig scf_config(const RunConfig& c, bool hartree) {
  SCFConfig s = c.scf;
  s.hartree = hartree;
  s.solver.threads = c.threads;
  return s;
}

SCFResult linear_run(const System& m, const RunConfig& c, const KGrid& grid) {
  return scf(m.basis, grid, m.vlin, scf_config(c, false), uniform_density(m.rlat, c.scf.nocc));
}

void full_precision(std::ostream& out) { out << std::setprecision(12); }

void write_gnuplot(const std::string& path, const std::string& csv, double e_alpha, double e_logc) {
  std::ofstream p(path);
  if (!p) throw ConfigError("cannot write plot script " + path);
  p << "set datafile separator ','\n"
    << "set logscale y\n"
    << "set xlabel 'L'\n"
    << "set ylabel 'error'\n"
    << "set key top right\n"
    << "fit_e(x) = exp(" << e_logc << " - " << e_alpha << " * x)\n"
    << "plot '" << csv << "' using 1:3 skip 1 with linespoints title 'energy error (eV)', \\\n"
    << "     '" << csv << "' using 1:4 skip 1 with linespoints title 'density error (L-inf)', \\\n"
    << "     fit_e(x) * " << kHartreeInEv << " with lines dashtype 2 title 'energy fit'\n";
}

}  // namespace

void cmd_bands(const RunConfig& c, std::ostream& out) {
  const System m = build_model(c);
  if (static_cast<std::size_t>(c.band_count) > m.basis.size())
    throw ConfigError("bands.count exceeds the basis size " + std::to_string(m.basis.size()));
  const FiberHamiltonian h(m.basis, m.vlin);
  FiberSolverOptions opts = c.scf.solver;
  opts.threads = c.threads;
  full_precision(out);
  out << "q1,q2,q3,band,energy_ha,energy_ev\n";
  for (const Vec3& alpha : c.band_points) {
    const Vec3 q = alpha[0] * m.rlat.b(0) + alpha[1] * m.rlat.b(1) + alpha[2] * m.rlat.b(2);
    const FiberSolution s = h.solve(q, c.band_count, opts);
    for (int n = 0; n < c.band_count && n < s.eigenvalues.size(); ++n) {
      out << alpha[0] << ',' << alpha[1] << ',' << alpha[2] << ',' << n + 1 << ',' << s.eigenvalues[n]
          << ',' << hartree_to_ev(s.eigenvalues[n]) << '\n';
    }
  }
}

void cmd_scf(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const System m = build_model(c);
  const KGrid grid = kgrid(m.rlat, c.L);
  log << "basis size " << m.basis.size() << ", grid " << c.L << "^3\n";

  PeriodicFunction vext = m.vlin;
  std::optional<PeriodicFunction> rho_linear;
  if (c.model == Model::kRhf) {
    rho_linear = linear_run(m, c, grid).density;
    vext = rhf_pseudopotential(m.vlin, *rho_linear);
  }

  PeriodicFunction rho0 = uniform_density(m.rlat, c.scf.nocc);
  if (c.initial_density == "linear") {
    if (!rho_linear) rho_linear = linear_run(m, c, grid).density;
    rho0 = *rho_linear;
  } else if (c.initial_density != "uniform") {
    std::ifstream in(c.initial_density);
    if (!in) throw ConfigError("cannot open initial density " + c.initial_density);
    rho0 = read_table(in);
    if (!(rho0.rlat() == m.rlat)) throw ConfigError("initial density is on a different lattice");
  }

  full_precision(out);
  out << "iter,residual_linf,energy_ha,gap_ha\n";
  const SCFResult r =
      scf(m.basis, grid, vext, scf_config(c, c.model == Model::kRhf), rho0, [&](const SCFIteration& it) {
        out << it.iter << ',' << it.residual_linf << ',' << it.energy << ',' << it.gap << '\n';
        out.flush();
      });
  out << "# converged=" << (r.converged ? "true" : "false") << ", iterations=" << r.iterations
      << ", residual=" << r.residual << '\n';
  out << "# energy_ha=" << r.energy_per_cell << ", energy_ev=" << hartree_to_ev(r.energy_per_cell)
      << ", gap_ha=" << r.gap << ", gap_ev=" << hartree_to_ev(r.gap) << ", fermi_ha=" << r.fermi << '\n';
  if (rho_linear && c.model == Model::kRhf)
    out << "# density_deviation_from_linear=" << sup_norm(r.density - *rho_linear) << '\n';

  if (!c.checkpoint.empty()) {
    std::ofstream ck(c.checkpoint);
    if (!ck) throw ConfigError("cannot write checkpoint " + c.checkpoint);
    write_table(ck, r.density);
    log << "density written to " << c.checkpoint << '\n';
  }
}

void cmd_study(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const System m = build_model(c);
  StudyConfig sc;
  sc.model = c.model;
  sc.sizes = c.sizes;
  sc.reference = c.reference;
  sc.scf = scf_config(c, c.model == Model::kRhf);
  log << "basis size " << m.basis.size() << ", reference grid " << c.reference << "^3\n";

  full_precision(out);
  out << "L,energy_error_ha,energy_error_ev,density_error_inf,wall_time_s\n";
  const StudyResult r = run_study(m.basis, m.vlin, sc, [&](const StudyRow& row) {
    out << row.L << ',' << row.energy_error << ',' << hartree_to_ev(row.energy_error) << ','
        << row.density_error_inf << ',' << row.wall_time << '\n';
    out.flush();
    log << "L=" << row.L << " done in " << row.wall_time << " s\n";
  });

  const double v_inf = sup_norm(r.reference.potential);
  const RateBound bound = theoretical_rate(m.lattice, v_inf, r.reference.gap, r.reference.fermi);
  std::vector<RatePoint> energy;
  std::vector<RatePoint> density;
  for (const StudyRow& row : r.rows) {
    energy.push_back({row.L, row.energy_error});
    density.push_back({row.L, row.density_error_inf});
  }
  std::optional<FitResult> energy_fit;
  for (auto [name, pts] : {std::pair{"energy", &energy}, std::pair{"density", &density}}) {
    try {
      const FitResult f = fit_rate(*pts);
      out << "# alpha_obs=" << f.alpha_obs << ", r2=" << f.r_squared << ", alpha_theory=" << bound.alpha
          << ", quantity=" << name << ", rows_used=" << f.used.size();
      if (!f.dropped_transient.empty()) {
        out << ", dropped_transient=";
        for (std::size_t i = 0; i < f.dropped_transient.size(); ++i)
          out << (i ? ";" : "") << f.dropped_transient[i];
      }
      out << '\n';
      if (std::string(name) == "energy") energy_fit = f;
    } catch (const InsufficientDataError& e) {
      out << "# alpha_obs=nan, r2=nan, alpha_theory=" << bound.alpha << ", quantity=" << name
          << ", note=" << e.what() << '\n';
    }
  }
  out << "# reference_L=" << c.reference << ", reference_energy_ha=" << r.reference.energy_per_cell
      << ", gap_ha=" << r.reference.gap << ", basis_size=" << m.basis.size() << '\n';

  if (!c.plot.empty()) {
    if (c.output.empty()) throw ConfigError("output.plot needs output.path for the data file");
    write_gnuplot(c.plot, c.output, energy_fit ? energy_fit->alpha_obs : 0.0,
                  energy_fit ? energy_fit->log_c : 0.0);
  }
}

void cmd_rate_bound(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const System m = build_model(c);
  log << "measuring gap on the " << c.L << "^3 grid\n";
  const SCFResult lin = linear_run(m, c, kgrid(m.rlat, c.L));
  const RateBound b = theoretical_rate(m.lattice, sup_norm(m.vlin), lin.gap, lin.fermi);
  full_precision(out);
  out << "quantity,value\n"
      << "v_inf_ha," << b.v_inf << '\n'
      << "gap_ha," << b.gap << '\n'
      << "fermi_ha," << b.fermi << '\n'
      << "bz_radius," << b.bz_radius << '\n'
      << "max_reciprocal_norm," << b.max_reciprocal_norm << '\n'
      << "C1," << b.C1 << '\n'
      << "A," << b.A << '\n'
      << "C2," << b.C2 << '\n'
      << "alpha," << b.alpha << '\n'
      << "C0," << b.C0 << '\n'
      << "C3," << b.C3 << '\n'
      << "lattice_sum," << b.lattice_sum << '\n'
      << "C4," << b.C4 << '\n'
      << "C5," << b.C5 << '\n'
      << "C6," << b.C6 << '\n';
}

void cmd_riemann(const RunConfig& c, std::ostream& out) {
  const ExponentialLatticeSeries series{c.riemann_kappa, c.riemann_beta};
  out << std::setprecision(17);
  out << "L,lhs_re,lhs_im,rhs_re,rhs_im,abs_diff\n";
  std::vector<RatePoint> pts;
  for (int L = 1; L <= c.riemann_max_L; ++L) {
    const RiemannCheck r = riemann_check(series, L);
    out << L << ',' << r.lhs.real() << ',' << r.lhs.imag() << ',' << r.rhs.real() << ',' << r.rhs.imag()
        << ',' << std::abs(r.lhs - r.rhs) << '\n';
    pts.push_back({L, std::abs(r.lhs)});
  }
  try {
    const FitResult f = fit_rate(pts);
    out << "# alpha_obs=" << f.alpha_obs << ", r2=" << f.r_squared << ", beta=" << c.riemann_beta << '\n';
  } catch (const InsufficientDataError& e) {
    out << "# fit unavailable: " << e.what() << '\n';
  }
}

}  // namespace bzconv::cli
