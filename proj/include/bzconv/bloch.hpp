#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <optional>
#include <span>
#include <vector>

#include "bzconv/lattice.hpp"
#include "bzconv/pwbasis.hpp"

namespace bzconv {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// The L^3 uniform sampling points (L^-1 R*) inside the reduced cell
/// {sum alpha_i b_i, alpha_i in [-1/2, 1/2)}, ordered lexicographically by
/// their integer indices.
struct KGrid {
  int L = 0;
  std::vector<Vec3> points;
  /// Point p is sum_i (indices[p][i] / L) b_i.
  std::vector<MillerIndex> indices;

  std::size_t size() const { return points.size(); }
};

/// Integer indices of the grid points, m_i in {-floor(L/2), ..., -floor(L/2) + L - 1}.
std::vector<MillerIndex> kgrid_indices(int L);

/// Throws DomainError for L <= 0.
KGrid kgrid(const ReciprocalLattice& rlat, int L);

/// Plane-wave matrix of the fiber Hamiltonian at quasi-momentum q:
/// H(G, G') = 1/2 |G + q|^2 delta_{GG'} + V_{G - G'}.
MatrixXc assemble(const Vec3& q, const PeriodicFunction& potential, const PlaneWaveBasis& basis);

/// Lowest eigenpairs of one fiber. Columns of `eigenvectors` are
/// orthonormal coefficient vectors on the basis.
struct FiberSolution {
  Vec3 q = Vec3::Zero();
  Eigen::VectorXd eigenvalues;
  MatrixXc eigenvectors;
};

/// Lowest min(n + 1, dim) eigenpairs of a Hermitian matrix (the extra one is
/// the buffer band used for gap measurements). Throws NumericalError when
/// the solver fails or a residual exceeds 1e-8 (1 + |lambda|).
FiberSolution eigensolve_lowest(const MatrixXc& h, int n);

struct FermiGap {
  double fermi = 0.0;  ///< mid-gap
  double gap = 0.0;    ///< lumo - homo
  double homo = 0.0;
  double lumo = 0.0;
};

inline constexpr double kDefaultGapTolerance = 1e-6;

/// homo = max over fibers of band nocc, lumo = min of band nocc + 1.
/// Throws MetallicError when gap <= gap_tolerance.
FermiGap fermi_and_gap(std::span<const FiberSolution> solutions, int nocc,
                       double gap_tolerance = kDefaultGapTolerance);

enum class EigenMethod { kAuto, kDense, kDavidson };

struct FiberSolverOptions {
  EigenMethod method = EigenMethod::kAuto;
  int threads = 1;
  /// Davidson convergence: residual <= tol (1 + |lambda|).
  double davidson_tolerance = 1e-10;
  int davidson_max_iterations = 500;
  /// Extra trial vectors carried beyond the requested bands.
  int davidson_guard_vectors = 3;
};

/// The q-independent part of every fiber Hamiltonian for a fixed potential
/// and basis. Holds the potential block once and reuses it for every fiber.
class FiberHamiltonian {
 public:
  FiberHamiltonian(const PlaneWaveBasis& basis, const PeriodicFunction& potential);

  const PlaneWaveBasis& basis() const { return *basis_; }
  /// Fraction of nonzero entries in the potential block.
  double fill() const { return fill_; }

  MatrixXc assemble(const Vec3& q) const;
  /// y = H_q x for a block of column vectors.
  MatrixXc apply(const Vec3& q, const MatrixXc& x) const;
  Eigen::VectorXd diagonal(const Vec3& q) const;

  /// Lowest n + 1 eigenpairs at q.
  FiberSolution solve(const Vec3& q, int n, const FiberSolverOptions& options) const;

 private:
  const PlaneWaveBasis* basis_;
  MatrixXc dense_;
  std::optional<Eigen::SparseMatrix<Complex, Eigen::RowMajor>> sparse_;
  double fill_ = 1.0;
};

/// Solves every fiber of the grid, in grid order.
std::vector<FiberSolution> solve_fibers(const KGrid& grid, const FiberHamiltonian& hamiltonian,
                                        int n, const FiberSolverOptions& options = {});

}  // namespace bzconv
