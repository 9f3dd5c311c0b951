#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>

namespace bzconv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Integer coordinates of a lattice vector in its basis.
using MillerIndex = std::array<int, 3>;

struct MillerIndexHash {
  std::size_t operator()(const MillerIndex& m) const noexcept {
    std::size_t h = static_cast<std::size_t>(m[0]) * 73856093u;
    h ^= static_cast<std::size_t>(m[1]) * 19349663u;
    h ^= static_cast<std::size_t>(m[2]) * 83492791u;
    return h;
  }
};

inline MillerIndex operator-(const MillerIndex& a, const MillerIndex& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline MillerIndex operator+(const MillerIndex& a, const MillerIndex& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline MillerIndex operator-(const MillerIndex& a) { return {-a[0], -a[1], -a[2]}; }

/// Real-space Bravais lattice (lengths in Bohr). Immutable.
class Lattice {
 public:
  /// Throws DegenerateLatticeError when the vectors are (numerically)
  /// linearly dependent.
  Lattice(const Vec3& a1, const Vec3& a2, const Vec3& a3);

  /// Columns of `columns` are the lattice vectors.
  explicit Lattice(const Mat3& columns);

  const Vec3& a(int i) const { return vectors_[i]; }
  /// Matrix whose columns are a1, a2, a3.
  Mat3 matrix() const;
  /// |det[a1 a2 a3]|, Bohr^3.
  double volume() const { return volume_; }

  Vec3 vector(const MillerIndex& m) const {
    return m[0] * vectors_[0] + m[1] * vectors_[1] + m[2] * vectors_[2];
  }

 private:
  std::array<Vec3, 3> vectors_;
  double volume_;
};

/// Diamond-structure silicon: fcc vectors (a/2)(0,1,1), (a/2)(1,0,1), (a/2)(1,1,0).
Lattice silicon_fcc(double a);

/// The 2*pi-dual of a Lattice, with the geometry of the reduced cell
/// {sum alpha_i b_i, alpha_i in [-1/2, 1/2)} used for Brillouin-zone sampling.
class ReciprocalLattice {
 public:
  ReciprocalLattice(const Vec3& b1, const Vec3& b2, const Vec3& b3);

  const Vec3& b(int i) const { return vectors_[i]; }
  Mat3 matrix() const;

  /// Largest |q| over the reduced cell (max over the 8 corners).
  double bz_radius() const { return bz_radius_; }
  /// Largest |b_i|.
  double max_vector_norm() const;
  /// Volume of the reduced cell, Bohr^-3.
  double reciprocal_volume() const { return reciprocal_volume_; }
  /// Volume of the dual real-space unit cell, (2 pi)^3 / reciprocal_volume().
  double cell_volume() const;

  Vec3 vector(const MillerIndex& m) const {
    return m[0] * vectors_[0] + m[1] * vectors_[1] + m[2] * vectors_[2];
  }

  /// The real-space lattice this is the dual of.
  Lattice dual() const;

  /// Smallest singular value of [b1 b2 b3]; |sum m_i b_i| >= sigma_min |m|_2.
  double min_singular_value() const { return sigma_min_; }

  bool operator==(const ReciprocalLattice& other) const;

 private:
  std::array<Vec3, 3> vectors_;
  double bz_radius_;
  double reciprocal_volume_;
  double sigma_min_;
};

ReciprocalLattice reciprocal(const Lattice& lattice);

/// Coordinates (alpha_1, alpha_2, alpha_3) with q = sum alpha_i b_i.
Vec3 frac_coords(const ReciprocalLattice& rlat, const Vec3& q);

}  // namespace bzconv
