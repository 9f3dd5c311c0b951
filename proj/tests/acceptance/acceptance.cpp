// Acceptance checks, one per criterion. Usage: acceptance <1-8 | all>.
// Prints one "PASS"/"FAIL" line per criterion and exits nonzero on any failure.
#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "bzconv/bloch.hpp"
#include "bzconv/coulomb.hpp"
#include "bzconv/fit.hpp"
#include "bzconv/pseudopotential.hpp"
#include "bzconv/rate_bound.hpp"
#include "bzconv/rhf.hpp"
#include "bzconv/riemann.hpp"
#include "bzconv/study.hpp"
#include "test_util.hpp"

using namespace bzconv;
using namespace bzconv::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Silicon {
  Lattice lat = silicon_fcc(kSiliconA);
  ReciprocalLattice rlat = reciprocal(lat);
  PeriodicFunction vlin = cohen_bergstresser(lat, kSiliconA);
};

// Linear model on the L^3 grid.
SCFResult linear(const PlaneWaveBasis& basis, const PeriodicFunction& v, int L) {
  SCFConfig cfg;
  cfg.hartree = false;
  return scf(basis, kgrid(basis.rlat(), L), v, cfg, uniform_density(basis.rlat(), 4));
}

// alpha_theory as the rate-bound command computes it: the linear potential
// and the gap measured on the 8^3 grid.
double alpha_theory(const Silicon& si, const PlaneWaveBasis& basis) {
  const SCFResult r = linear(basis, si.vlin, 8);
  return theoretical_rate(si.lat, sup_norm(si.vlin), r.gap, r.fermi).alpha;
}

void check_basis_size(Verdict& v) {
  const Silicon si;
  const PlaneWaveBasis basis = build_basis(si.rlat, ev_to_hartree(736.0));
  v.detail << "|X| = " << basis.size() << " at 736 eV (expected 749)";
  v.require(basis.size() == 749, "|X| == 749");
}

void check_insulator(Verdict& v) {
  const Silicon si;
  const PlaneWaveBasis basis = build_basis(si.rlat, ev_to_hartree(736.0));
  const FiberHamiltonian h(basis, si.vlin);
  const auto sols = solve_fibers(kgrid(si.rlat, 8), h, 4);
  double homo = -1e300;
  double lumo = 1e300;
  for (const FiberSolution& s : sols) {
    homo = std::max(homo, s.eigenvalues[3]);
    lumo = std::min(lumo, s.eigenvalues[4]);
  }
  v.detail << "L = 8, |X| = " << basis.size() << ", gap = " << lumo - homo << " Ha ("
           << hartree_to_ev(lumo - homo) << " eV)";
  v.require(lumo - homo > 0.0, "gap > 0");
}

void check_riemann(Verdict& v) {
  const ExponentialLatticeSeries e{1.0, 0.5};
  double worst = 0.0;
  std::vector<RatePoint> pts;
  for (int L = 1; L <= 10; ++L) {
    const RiemannCheck c = riemann_check(e, L);
    worst = std::max(worst, std::abs(c.lhs - c.rhs));
    pts.push_back({L, std::abs(c.lhs)});
  }
  const FitResult f = fit_rate(pts);
  v.detail << "max |lhs - rhs| = " << worst << ", alpha_obs = " << f.alpha_obs << " vs beta = 0.5";
  v.require(worst <= 1e-12, "identity within 1e-12");
  v.require(std::abs(f.alpha_obs - 0.5) <= 0.05 * 0.5, "fit within 5%");
}

void check_study(Verdict& v, Model model) {
  const Silicon si;
  const PlaneWaveBasis basis = build_basis(si.rlat, ev_to_hartree(180.0));
  StudyConfig cfg;
  cfg.model = model;
  cfg.sizes = {4, 6, 8, 10, 12};
  cfg.reference = 24;
  cfg.scf.tol_density = 1e-7;
  cfg.scf.max_iter = 200;
  const StudyResult r = run_study(basis, si.vlin, cfg);
  const double theory = alpha_theory(si, basis);

  std::vector<RatePoint> energy;
  std::vector<RatePoint> density;
  bool energy_down = true;
  bool density_down = true;
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    energy.push_back({r.rows[i].L, r.rows[i].energy_error});
    density.push_back({r.rows[i].L, r.rows[i].density_error_inf});
    worst_residual = std::max(worst_residual, r.rows[i].scf_residual);
    if (i > 0) {
      energy_down = energy_down && r.rows[i].energy_error < r.rows[i - 1].energy_error;
      density_down = density_down && r.rows[i].density_error_inf < r.rows[i - 1].density_error_inf;
    }
  }
  const FitResult fe = fit_rate(energy);
  const FitResult fd = fit_rate(density);
  v.detail << "|X| = " << basis.size() << "; dE(eV) =";
  for (const StudyRow& row : r.rows) v.detail << ' ' << hartree_to_ev(row.energy_error);
  v.detail << "; drho =";
  for (const StudyRow& row : r.rows) v.detail << ' ' << row.density_error_inf;
  v.detail << "; energy alpha_obs = " << fe.alpha_obs << " (r2 " << fe.r_squared << ", "
           << fe.dropped_transient.size() << " dropped); density alpha_obs = " << fd.alpha_obs << " (r2 "
           << fd.r_squared << ", " << fd.dropped_transient.size() << " dropped); alpha_theory = " << theory;
  v.require(energy_down, "energy error strictly decreasing");
  v.require(density_down, "density error strictly decreasing");
  for (const FitResult* f : {&fe, &fd}) {
    v.require(f->r_squared >= 0.95, "r2 >= 0.95");
    v.require(f->alpha_obs > 0.0, "alpha_obs > 0");
    v.require(f->alpha_obs >= theory, "alpha_obs >= alpha_theory");
  }
  if (model == Model::kRhf) {
    v.detail << "; max SCF residual = " << worst_residual;
    v.require(r.reference.residual < 1e-7, "reference SCF residual < 1e-7");
    v.require(worst_residual < 1e-7, "SCF residual < 1e-7 at every L");
  }
}

void check_fixed_point(Verdict& v) {
  const Silicon si;
  const PlaneWaveBasis basis = build_basis(si.rlat, ev_to_hartree(180.0));
  const int L = 6;
  const SCFResult lin = linear(basis, si.vlin, L);
  SCFConfig cfg;
  cfg.tol_density = 1e-7;
  cfg.max_iter = 200;
  const SCFResult r = scf(basis, kgrid(si.rlat, L), rhf_pseudopotential(si.vlin, lin.density), cfg,
                          uniform_density(si.rlat, 4));
  const double dev = sup_norm(r.density - lin.density);
  v.detail << "L = " << L << ", " << r.iterations << " SCF iterations from the uniform density, "
           << "sup |rho - rho_lin| = " << dev;
  v.require(dev <= 10 * cfg.tol_density, "within 10 tol_density");
}

void check_oracles(Verdict& v) {
  std::mt19937 rng(2024);
  const Silicon si;
  const Lattice& lat = si.lat;
  const ReciprocalLattice& r = si.rlat;

  // Coulomb energy against real-space quadrature of hartree(f) g (exact on a 7^3 grid).
  const PeriodicFunction f = random_real_function(r, 1, rng, true);
  const PeriodicFunction g = random_real_function(r, 2, rng, true);
  const PeriodicFunction vf = hartree(f);
  double quad = 0.0;
  const int n = 7;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x = (i * lat.a(0) + j * lat.a(1) + k * lat.a(2)) / n;
        quad += (direct_value(vf, x) * direct_value(g, x)).real();
      }
  quad *= lat.volume() / (n * n * n);
  const double coulomb_rel = std::abs(coulomb_energy(f, g) - quad) / std::abs(quad);

  // autocorrelate against |u|^2 / |cell| on a grid.
  const PlaneWaveBasis basis = build_basis(r, 1.5);
  std::normal_distribution<double> normal;
  std::vector<Complex> c(basis.size());
  for (Complex& x : c) x = Complex(normal(rng), normal(rng));
  const auto rho = eval_on_grid(autocorrelate(basis, c), n);
  double auto_err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x = (i * lat.a(0) + j * lat.a(1) + k * lat.a(2)) / n;
        Complex u{};
        for (std::size_t p = 0; p < basis.size(); ++p) u += c[p] * std::polar(1.0, basis.gvec(p).dot(x));
        auto_err = std::max(auto_err, std::abs(rho[grid_index(n, i, j, k)] - std::norm(u) / r.cell_volume()));
      }

  // Lowest eigenvalues of a 50x50 random Hermitian matrix against a full solve.
  Eigen::MatrixXcd a(50, 50);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(normal(rng), normal(rng));
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  const FiberSolution s = eigensolve_lowest(h, 10);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(h);
  double eig_err = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    eig_err = std::max(eig_err, std::abs(s.eigenvalues[i] - full.eigenvalues()[i]));

  // Free electrons: eigenvalues are the sorted 1/2 |G + q|^2.
  const PlaneWaveBasis fb = build_basis(r, 2.0);
  const Vec3 q = 0.3 * r.b(0) - 0.2 * r.b(2);
  const FiberSolution fs = eigensolve_lowest(assemble(q, PeriodicFunction(r, true), fb), 8);
  std::vector<double> kin;
  for (const Vec3& G : fb.gvecs()) kin.push_back(0.5 * (G + q).squaredNorm());
  std::sort(kin.begin(), kin.end());
  double free_err = 0.0;
  for (Eigen::Index i = 0; i < fs.eigenvalues.size(); ++i) free_err = std::max(free_err, std::abs(fs.eigenvalues[i] - kin[i]));

  v.detail << "coulomb rel err " << coulomb_rel << ", autocorrelate err " << auto_err << ", eigen err " << eig_err
           << ", free-electron err " << free_err;
  v.require(coulomb_rel <= 1e-8, "coulomb <= 1e-8 relative");
  v.require(auto_err <= 1e-10, "autocorrelate <= 1e-10");
  v.require(eig_err <= 1e-10, "eigensolve <= 1e-10");
  v.require(free_err <= 1e-12, "free electrons <= 1e-12");
}

void check_conservation(Verdict& v) {
  const Silicon si;
  const PlaneWaveBasis basis = build_basis(si.rlat, ev_to_hartree(180.0));
  const KGrid grid = kgrid(si.rlat, 4);
  const SCFResult lin = linear(basis, si.vlin, 4);
  const PeriodicFunction vext = rhf_pseudopotential(si.vlin, lin.density);

  SCFConfig cfg;
  cfg.tol_density = 1e-9;
  cfg.anderson_depth = 5;
  double charge_err = 0.0;
  const SCFResult a = scf(basis, grid, vext, cfg, uniform_density(si.rlat, 4), [&](const SCFIteration& it) {
    charge_err = std::max(charge_err, std::abs(it.charge - 4.0));
  });

  std::mt19937 rng(99);
  int negative = 0;
  for (int t = 0; t < 100; ++t) {
    const ReciprocalLattice r = reciprocal(random_lattice(rng));
    const PeriodicFunction f = random_real_function(r, 2, rng, true);
    if (coulomb_energy(f, f) < 0.0) ++negative;
  }

  const double shift = 0.37;
  PeriodicFunction shifted = vext;
  shifted.add({0, 0, 0}, shift);
  const SCFResult b = scf(basis, grid, shifted, cfg, uniform_density(si.rlat, 4));
  const double de = b.energy_per_cell - a.energy_per_cell - shift * 4;
  const double drho = sup_norm(b.density - a.density);

  v.detail << "max |charge - nocc| = " << charge_err << " over " << a.iterations << " iterates; " << negative
           << "/100 negative D(f,f); gauge: energy shift error " << de << ", density change " << drho;
  v.require(charge_err <= 1e-10, "neutrality within 1e-10");
  v.require(negative == 0, "D(f,f) >= 0");
  v.require(std::abs(de) <= 1e-10, "energy shifts by v * nocc");
  v.require(drho <= 1e-10, "density unchanged");
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<void(Verdict&)> run;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> c = {
      {1, {"basis-size reproduction", 1, check_basis_size}},
      {2, {"insulator at L = 8, full cutoff", 300, check_insulator}},
      {3, {"Riemann identity", 10, check_riemann}},
      {4, {"linear exponential convergence", 900, [](Verdict& v) { check_study(v, Model::kLinear); }}},
      {5, {"rHF exponential convergence", 2700, [](Verdict& v) { check_study(v, Model::kRhf); }}},
      {6, {"fixed-point consistency", 300, check_fixed_point}},
      {7, {"oracle equivalences", 60, check_oracles}},
      {8, {"conservation suite", 60, check_conservation}},
  };
  return c;
}

bool run(int id) {
  const Criterion& c = criteria().at(id);
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.run(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.detail << "; " << elapsed << " s";
  v.require(elapsed <= c.budget_s, "runtime budget " + std::to_string(static_cast<int>(c.budget_s)) + " s");
  std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, c.name, v.detail.str().c_str());
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool ok = true;
  if (which == "all") {
    for (const auto& [id, c] : criteria()) ok = run(id) && ok;
  } else {
    const int id = std::atoi(which.c_str());
    if (!criteria().contains(id)) {
      std::fprintf(stderr, "usage: acceptance <1-8 | all>\n");
      return 2;
    }
    ok = run(id);
  }
  return ok ? 0 : 1;
}
