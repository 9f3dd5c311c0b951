#include "bzconv/davidson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

// Orthonormalizes the columns of `block` against the orthonormal columns of
// `basis` and among themselves (two passes of block Gram-Schmidt, then
// modified Gram-Schmidt). Columns that collapse below `drop` are discarded.
MatrixXcd orthonormalize_against(const MatrixXcd& basis, MatrixXcd block, double drop = 1e-10) {
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) block -= basis * (basis.adjoint() * block);
  }
  MatrixXcd out(block.rows(), block.cols());
  int kept = 0;
  for (int j = 0; j < block.cols(); ++j) {
    Eigen::VectorXcd v = block.col(j);
    const double before = v.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < kept; ++i) v -= out.col(i) * out.col(i).dot(v);
      if (basis.cols() > 0) v -= basis * (basis.adjoint() * v);
    }
    const double after = v.norm();
    if (after <= drop * before) continue;
    out.col(kept++) = v / after;
  }
  return out.leftCols(kept);
}

}  // namespace

DavidsonResult davidson_lowest(const std::function<MatrixXcd(const MatrixXcd&)>& apply,
                               const VectorXd& diagonal, int nwant, const MatrixXcd& guess,
                               double tolerance, int max_iterations) {
  const int dim = static_cast<int>(diagonal.size());
  const int block = static_cast<int>(guess.cols());
  if (nwant < 1 || nwant > block || block > dim) {
    throw DomainError("davidson: need 1 <= nwant <= guess columns <= dimension");
  }
  const int max_subspace = std::min(dim, std::max(4 * block, block + 8));

  MatrixXcd v = orthonormalize_against(MatrixXcd(dim, 0), guess);
  if (v.cols() < block) throw NumericalError("davidson: initial guess is rank deficient");
  MatrixXcd hv = apply(v);

  DavidsonResult result;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    MatrixXcd projected = v.adjoint() * hv;
    projected = 0.5 * (projected + projected.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> small(projected);
    if (small.info() != Eigen::Success) throw NumericalError("davidson: Rayleigh-Ritz step failed");

    const MatrixXcd y = small.eigenvectors().leftCols(block);
    const VectorXd theta = small.eigenvalues().head(block);
    const MatrixXcd x = v * y;
    const MatrixXcd hx = hv * y;
    MatrixXcd residual = hx - x * theta.asDiagonal();

    double worst = 0.0;
    std::vector<int> open;
    for (int i = 0; i < block; ++i) {
      const double r = residual.col(i).norm() / (1.0 + std::abs(theta[i]));
      if (i < nwant) worst = std::max(worst, r);
      if (r > tolerance) open.push_back(i);
    }
    if (worst <= tolerance) {
      result.eigenvalues = theta.head(nwant);
      result.eigenvectors = x.leftCols(nwant);
      result.iterations = iter;
      result.max_residual = worst;
      return result;
    }

    MatrixXcd corrections(dim, static_cast<int>(open.size()));
    for (std::size_t c = 0; c < open.size(); ++c) {
      const int i = open[c];
      for (int g = 0; g < dim; ++g) {
        double denom = diagonal[g] - theta[i];
        if (std::abs(denom) < 1e-2) denom = denom < 0 ? -1e-2 : 1e-2;
        corrections(g, c) = residual(g, i) / denom;
      }
    }

    if (v.cols() + corrections.cols() > max_subspace) {
      // Restart from the current Ritz block.
      v = x;
      hv = hx;
    }
    MatrixXcd fresh = orthonormalize_against(v, corrections);
    if (fresh.cols() == 0) {
      // Stagnation: the preconditioned residuals lie in the subspace.
      fresh = orthonormalize_against(v, residual);
      if (fresh.cols() == 0) break;
    }
    const MatrixXcd hfresh = apply(fresh);
    MatrixXcd v_next(dim, v.cols() + fresh.cols());
    v_next << v, fresh;
    MatrixXcd hv_next(dim, hv.cols() + hfresh.cols());
    hv_next << hv, hfresh;
    v = std::move(v_next);
    hv = std::move(hv_next);
    result.max_residual = worst;
  }
  std::ostringstream msg;
  msg << "davidson did not converge in " << max_iterations << " iterations (residual "
      << result.max_residual << ", tolerance " << tolerance << ")";
  throw NumericalError(msg.str());
}

}  // namespace bzconv
