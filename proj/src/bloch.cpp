#include "bzconv/bloch.hpp"

#include <lapacke.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bzconv/davidson.hpp"
#include "bzconv/errors.hpp"
#include "bzconv/parallel.hpp"

namespace bzconv {

std::vector<MillerIndex> kgrid_indices(int L) {
  if (L <= 0) throw DomainError("grid size L must be positive");
  // L consecutive integers whose quotient by L lies in [-1/2, 1/2).
  const int lo = -(L / 2);
  std::vector<MillerIndex> indices;
  indices.reserve(static_cast<std::size_t>(L) * L * L);
  for (int m1 = lo; m1 < lo + L; ++m1) {
    for (int m2 = lo; m2 < lo + L; ++m2) {
      for (int m3 = lo; m3 < lo + L; ++m3) indices.push_back({m1, m2, m3});
    }
  }
  return indices;
}

KGrid kgrid(const ReciprocalLattice& rlat, int L) {
  KGrid grid;
  grid.L = L;
  grid.indices = kgrid_indices(L);
  grid.points.reserve(grid.indices.size());
  for (const MillerIndex& m : grid.indices) grid.points.push_back(rlat.vector(m) / L);
  return grid;
}

namespace {

MatrixXc potential_block(const PlaneWaveBasis& basis, const PeriodicFunction& potential) {
  if (!potential.real_valued()) throw DomainError("fiber potential must be real-valued");
  const auto n = static_cast<Eigen::Index>(basis.size());
  MatrixXc v = MatrixXc::Zero(n, n);
  if (potential.coeffs().empty()) return v;
  // Walk the potential's support rather than all pairs when it is small.
  for (Eigen::Index j = 0; j < n; ++j) {
    const MillerIndex& gj = basis.miller(j);
    for (const auto& [k, c] : potential.coeffs()) {
      if (auto i = basis.find(gj + k)) v(static_cast<Eigen::Index>(*i), j) = c;
    }
  }
  return v;
}

}  // namespace

MatrixXc assemble(const Vec3& q, const PeriodicFunction& potential, const PlaneWaveBasis& basis) {
  MatrixXc h = potential_block(basis, potential);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) += 0.5 * (basis.gvec(i) + q).squaredNorm();
  }
  return h;
}

FiberSolution eigensolve_lowest(const MatrixXc& h, int n) {
  const auto dim = static_cast<int>(h.rows());
  if (h.cols() != dim) throw DomainError("eigensolve_lowest: matrix is not square");
  if (n < 1 || n > dim) throw DomainError("eigensolve_lowest: need 1 <= n <= dim");
  const int count = std::min(n + 1, dim);

  MatrixXc a = h;
  Eigen::VectorXd w(dim);
  MatrixXc z(dim, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', dim, reinterpret_cast<lapack_complex_double*>(a.data()), dim,
      0.0, 0.0, 1, count, abstol, &found, w.data(),
      reinterpret_cast<lapack_complex_double*>(z.data()), dim, support.data());
  if (info != 0 || found != count) {
    std::ostringstream msg;
    msg << "zheevr failed: info=" << info << ", found " << found << " of " << count
        << " eigenpairs (dim " << dim << ")";
    throw NumericalError(msg.str());
  }

  FiberSolution sol;
  sol.eigenvalues = w.head(count);
  sol.eigenvectors = std::move(z);
  const MatrixXc residual = h * sol.eigenvectors - sol.eigenvectors * sol.eigenvalues.asDiagonal();
  for (int i = 0; i < count; ++i) {
    const double r = residual.col(i).norm();
    if (r > 1e-8 * (1.0 + std::abs(sol.eigenvalues[i]))) {
      std::ostringstream msg;
      msg << "eigenpair " << i << " residual " << r << " exceeds tolerance (lambda "
          << sol.eigenvalues[i] << ", dim " << dim << ")";
      throw NumericalError(msg.str());
    }
  }
  return sol;
}

FermiGap fermi_and_gap(std::span<const FiberSolution> solutions, int nocc, double gap_tolerance) {
  if (solutions.empty()) throw DomainError("fermi_and_gap: no fiber solutions");
  if (nocc < 1) throw DomainError("fermi_and_gap: nocc must be positive");
  FermiGap fg;
  fg.homo = -std::numeric_limits<double>::infinity();
  fg.lumo = std::numeric_limits<double>::infinity();
  for (const FiberSolution& s : solutions) {
    if (s.eigenvalues.size() < nocc + 1) {
      throw DomainError("fermi_and_gap: fiber carries fewer than nocc + 1 eigenvalues");
    }
    fg.homo = std::max(fg.homo, s.eigenvalues[nocc - 1]);
    fg.lumo = std::min(fg.lumo, s.eigenvalues[nocc]);
  }
  fg.gap = fg.lumo - fg.homo;
  fg.fermi = 0.5 * (fg.homo + fg.lumo);
  if (!(fg.gap > gap_tolerance)) {
    std::ostringstream msg;
    msg << "spectral gap " << fg.gap << " Ha at nocc=" << nocc << " is below tolerance "
        << gap_tolerance << " (metallic or degenerate Fermi level)";
    throw MetallicError(msg.str(), fg.gap);
  }
  return fg;
}

// ---------------------------------------------------------------------------
// FiberHamiltonian

FiberHamiltonian::FiberHamiltonian(const PlaneWaveBasis& basis, const PeriodicFunction& potential)
    : basis_(&basis), dense_(potential_block(basis, potential)) {
  const double n = static_cast<double>(basis.size());
  const auto nnz = static_cast<double>((dense_.array() != Complex{}).count());
  fill_ = n > 0 ? nnz / (n * n) : 0.0;
  if (fill_ < 0.1) sparse_ = dense_.sparseView();
}

MatrixXc FiberHamiltonian::assemble(const Vec3& q) const {
  MatrixXc h = dense_;
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) += 0.5 * (basis_->gvec(i) + q).squaredNorm();
  }
  return h;
}

Eigen::VectorXd FiberHamiltonian::diagonal(const Vec3& q) const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(basis_->size()));
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    d[static_cast<Eigen::Index>(i)] =
        0.5 * (basis_->gvec(i) + q).squaredNorm() + dense_(static_cast<Eigen::Index>(i),
                                                           static_cast<Eigen::Index>(i)).real();
  }
  return d;
}

MatrixXc FiberHamiltonian::apply(const Vec3& q, const MatrixXc& x) const {
  MatrixXc y = sparse_ ? MatrixXc(*sparse_ * x) : MatrixXc(dense_ * x);
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y.row(ii) += 0.5 * (basis_->gvec(i) + q).squaredNorm() * x.row(ii);
  }
  return y;
}

FiberSolution FiberHamiltonian::solve(const Vec3& q, int n, const FiberSolverOptions& options) const {
  const int dim = static_cast<int>(basis_->size());
  EigenMethod method = options.method;
  if (method == EigenMethod::kAuto) {
    // Dense LAPACK cost grows as dim^3; the sparse operator apply is ~linear.
    method = (dim > 600 && sparse_) ? EigenMethod::kDavidson : EigenMethod::kDense;
  }
  const int want = std::min(n + 1, dim);
  const int block = std::min(want + options.davidson_guard_vectors, dim);
  if (method == EigenMethod::kDense || block >= dim / 2) {
    FiberSolution sol = eigensolve_lowest(assemble(q), n);
    sol.q = q;
    return sol;
  }

  const Eigen::VectorXd diag = diagonal(q);
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });
  MatrixXc guess = MatrixXc::Zero(dim, block);
  for (int c = 0; c < block; ++c) guess(order[c], c) = 1.0;

  const DavidsonResult dr = davidson_lowest(
      [&](const MatrixXc& x) { return apply(q, x); }, diag, want, guess,
      options.davidson_tolerance, options.davidson_max_iterations);
  FiberSolution sol;
  sol.q = q;
  sol.eigenvalues = dr.eigenvalues;
  sol.eigenvectors = dr.eigenvectors;
  return sol;
}

std::vector<FiberSolution> solve_fibers(const KGrid& grid, const FiberHamiltonian& hamiltonian,
                                        int n, const FiberSolverOptions& options) {
  std::vector<FiberSolution> out(grid.size());
  parallel_for(grid.size(), options.threads,
               [&](std::size_t p) { out[p] = hamiltonian.solve(grid.points[p], n, options); });
  return out;
}

}  // namespace bzconv
