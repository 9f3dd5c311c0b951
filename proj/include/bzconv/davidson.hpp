#pragma once

#include <Eigen/Dense>
#include <functional>

namespace bzconv {

struct DavidsonResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  int iterations = 0;
  double max_residual = 0.0;
};

/// Block Davidson for the `nwant` lowest eigenpairs of a Hermitian operator,
/// with the diagonal preconditioner (diag - theta)^-1. `guess` supplies the
/// starting block; columns beyond nwant act as guard vectors and are not
/// required to converge. Throws NumericalError after `max_iterations`.
DavidsonResult davidson_lowest(
    const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply,
    const Eigen::VectorXd& diagonal, int nwant, const Eigen::MatrixXcd& guess,
    double tolerance, int max_iterations);

}  // namespace bzconv
