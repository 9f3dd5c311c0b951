#include "bzconv/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat3 columns_of(const std::array<Vec3, 3>& v) {
  Mat3 m;
  m.col(0) = v[0];
  m.col(1) = v[1];
  m.col(2) = v[2];
  return m;
}

void check_nondegenerate(const Mat3& m, const char* what) {
  const double det = std::abs(m.determinant());
  const double scale = m.col(0).norm() * m.col(1).norm() * m.col(2).norm();
  if (!std::isfinite(det) || det <= 1e-10 || det <= 1e-12 * scale) {
    throw DegenerateLatticeError(std::string(what) + " basis vectors are linearly dependent");
  }
}

}  // namespace

Lattice::Lattice(const Vec3& a1, const Vec3& a2, const Vec3& a3) : vectors_{a1, a2, a3} {
  const Mat3 m = columns_of(vectors_);
  check_nondegenerate(m, "lattice");
  volume_ = std::abs(m.determinant());
}

Lattice::Lattice(const Mat3& columns) : Lattice(columns.col(0), columns.col(1), columns.col(2)) {}

Mat3 Lattice::matrix() const { return columns_of(vectors_); }

Lattice silicon_fcc(double a) {
  const double h = 0.5 * a;
  return Lattice(Vec3(0, h, h), Vec3(h, 0, h), Vec3(h, h, 0));
}

ReciprocalLattice::ReciprocalLattice(const Vec3& b1, const Vec3& b2, const Vec3& b3)
    : vectors_{b1, b2, b3} {
  const Mat3 m = columns_of(vectors_);
  check_nondegenerate(m, "reciprocal lattice");
  reciprocal_volume_ = std::abs(m.determinant());

  // The reduced cell is a parallelepiped; |q| is convex so its sup is at a corner.
  bz_radius_ = 0.0;
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      for (int s3 : {-1, 1}) {
        const Vec3 corner = 0.5 * (s1 * b1 + s2 * b2 + s3 * b3);
        bz_radius_ = std::max(bz_radius_, corner.norm());
      }
    }
  }

  Eigen::JacobiSVD<Mat3> svd(m);
  sigma_min_ = svd.singularValues().minCoeff();
}

Mat3 ReciprocalLattice::matrix() const { return columns_of(vectors_); }

double ReciprocalLattice::max_vector_norm() const {
  return std::max({vectors_[0].norm(), vectors_[1].norm(), vectors_[2].norm()});
}

double ReciprocalLattice::cell_volume() const {
  return kTwoPi * kTwoPi * kTwoPi / reciprocal_volume_;
}

Lattice ReciprocalLattice::dual() const {
  // A = 2 pi (B^T)^-1, the same relation read backwards.
  const Mat3 a = kTwoPi * matrix().transpose().inverse();
  return Lattice(a);
}

bool ReciprocalLattice::operator==(const ReciprocalLattice& other) const {
  return vectors_ == other.vectors_;
}

ReciprocalLattice reciprocal(const Lattice& lattice) {
  const Mat3 a = lattice.matrix();
  // b_i . a_j = 2 pi delta_ij via cross products, avoiding an explicit inverse.
  const double vol = a.col(0).dot(a.col(1).cross(a.col(2)));
  const Vec3 b1 = kTwoPi * a.col(1).cross(a.col(2)) / vol;
  const Vec3 b2 = kTwoPi * a.col(2).cross(a.col(0)) / vol;
  const Vec3 b3 = kTwoPi * a.col(0).cross(a.col(1)) / vol;
  return ReciprocalLattice(b1, b2, b3);
}

Vec3 frac_coords(const ReciprocalLattice& rlat, const Vec3& q) {
  return rlat.matrix().partialPivLu().solve(q);
}

}  // namespace bzconv
