#include "bzconv/rate_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

constexpr double kPi = std::numbers::pi;

// Upper bound on sum_{|R| > rho} e^{-|R|} over the lattice.
//
// Each lattice point R owns the cell R + {sum t_i a_i, t_i in [-1/2, 1/2)},
// of volume |cell|, all of whose points x satisfy |x - R| <= r_c with
// r_c = (|a1| + |a2| + |a3|) / 2. Then e^{-|R|} <= e^{r_c} e^{-|x|} on the cell,
// and the cells of points with |R| > rho lie outside the ball of radius
// s = rho - r_c, so the tail is at most
//   (e^{r_c} / |cell|) * int_{|x| > s} e^{-|x|} dx
//     = (e^{r_c} / |cell|) * 4 pi e^{-s} (s^2 + 2 s + 2).
double real_space_tail_bound(double rho, double r_c, double volume) {
  const double s = rho - r_c;
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(r_c) / volume * 4.0 * kPi * std::exp(-s) * (s * s + 2.0 * s + 2.0);
}

}  // namespace

double inverse_square_lattice_sum(const ReciprocalLattice& rlat, double rel_tol) {
  // The reciprocal-space sum converges like 1/K, far too slowly to truncate
  // directly. By Poisson summation, with int (1 + |k|^2)^-2 e^{ik.x} dk =
  // pi^2 e^{-|x|},
  //   sum_{k in R*} (1 + |k|^2)^-2 = (|cell| / (8 pi)) sum_{R in lattice} e^{-|R|},
  // which converges exponentially. The real-space sum always contains the
  // R = 0 term 1, so a tail bound below rel_tol keeps the relative error below it.
  const Lattice lat = rlat.dual();
  const double volume = lat.volume();
  const double r_c = 0.5 * (lat.a(0).norm() + lat.a(1).norm() + lat.a(2).norm());

  double rho = r_c + 1.0;
  while (real_space_tail_bound(rho, r_c, volume) > rel_tol) rho += 1.0;

  const double sigma_min = Eigen::JacobiSVD<Mat3>(lat.matrix()).singularValues().minCoeff();
  const int kmax = static_cast<int>(std::ceil(rho / sigma_min));
  long double sum = 0.0L;
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      for (int k3 = -kmax; k3 <= kmax; ++k3) {
        const double r = lat.vector({k1, k2, k3}).norm();
        if (r <= rho) sum += std::exp(-r);
      }
    }
  }
  return volume / (8.0 * kPi) * static_cast<double>(sum);
}

double strip_decay_rate(double A, double max_reciprocal_norm) {
  return (2.0 / 3.0) * kPi * A / max_reciprocal_norm;
}

double riemann_prefactor(double alpha) {
  return 2.0 * (3.0 + std::exp(-2.0 * alpha)) / std::pow(1.0 - std::exp(-alpha), 3);
}

RateBound theoretical_rate(const Lattice& lattice, double v_inf, double gap, double fermi) {
  if (!(gap > 0.0)) throw DomainError("theoretical_rate: spectral gap must be positive");
  if (!(v_inf >= 0.0)) throw DomainError("theoretical_rate: |V|_inf must be nonnegative");

  const ReciprocalLattice rlat = reciprocal(lattice);
  RateBound b;
  b.v_inf = v_inf;
  b.gap = gap;
  b.fermi = fermi;
  b.bz_radius = rlat.bz_radius();
  // The reciprocal vectors are taken sorted by length, so |a3*| is the longest.
  b.max_reciprocal_norm = rlat.max_vector_norm();

  const double R = b.bz_radius;
  b.C1 = 4.0 + (2.0 + 4.0 * R * R + 8.0 * v_inf + 8.0 * fermi) / std::min(1.0, gap);
  if (!(b.C1 > 0.0)) {
    std::ostringstream msg;
    msg << "theoretical_rate: inputs give a nonpositive resolvent constant C1 = " << b.C1;
    throw DomainError(msg.str());
  }
  b.A = std::min(1.0, 1.0 / (2.0 * b.C1 * (1.0 + R)));
  b.C2 = 2.0 * b.C1;
  b.alpha = strip_decay_rate(b.A, b.max_reciprocal_norm);
  b.C0 = riemann_prefactor(b.alpha);
  b.C3 = b.C1 * (3.0 + fermi + v_inf) / kPi;
  b.lattice_sum = inverse_square_lattice_sum(rlat);
  b.C4 = b.C1 * b.C1 * b.lattice_sum;
  b.C5 = std::pow(R + b.A + 0.5, 2) * b.C3 * b.C3 * b.C4;
  b.C6 = b.C3 * b.C3 * b.lattice_sum;
  if (b.C3 < 0.0) throw DomainError("theoretical_rate: inputs give a negative constant C3");
  return b;
}

}  // namespace bzconv
