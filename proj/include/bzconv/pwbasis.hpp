#pragma once

#include <complex>
#include <cstdint>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "bzconv/lattice.hpp"

namespace bzconv {

using Complex = std::complex<double>;

/// Plane waves e^{iG.x}, G in the reciprocal lattice, with 1/2 |G|^2 < ecutoff.
/// Vectors are stored in lexicographic order of their Miller indices.
class PlaneWaveBasis {
 public:
  PlaneWaveBasis(ReciprocalLattice rlat, double ecutoff, std::vector<MillerIndex> millers);

  const ReciprocalLattice& rlat() const { return rlat_; }
  double ecutoff() const { return ecutoff_; }
  std::size_t size() const { return millers_.size(); }

  const MillerIndex& miller(std::size_t i) const { return millers_[i]; }
  const Vec3& gvec(std::size_t i) const { return gvecs_[i]; }
  const std::vector<MillerIndex>& millers() const { return millers_; }
  const std::vector<Vec3>& gvecs() const { return gvecs_; }

  std::optional<std::size_t> find(const MillerIndex& m) const;

  /// Largest |m_i| over the basis.
  int max_index() const { return max_index_; }

 private:
  ReciprocalLattice rlat_;
  double ecutoff_;
  std::vector<MillerIndex> millers_;
  std::vector<Vec3> gvecs_;
  std::unordered_map<MillerIndex, std::size_t, MillerIndexHash> index_;
  int max_index_ = 0;
};

inline constexpr std::size_t kDefaultMaxBasisSize = 200000;

/// Exhaustive enumeration of the cutoff ball. Throws ResourceError when the
/// basis would exceed `max_size`.
PlaneWaveBasis build_basis(const ReciprocalLattice& rlat, double ecutoff,
                           std::size_t max_size = kDefaultMaxBasisSize);

/// A lattice-periodic field f(x) = sum_k c_k e^{ik.x}, stored by its finitely
/// many nonzero Fourier coefficients.
class PeriodicFunction {
 public:
  using Coefficients = std::map<MillerIndex, Complex>;

  PeriodicFunction(ReciprocalLattice rlat, bool real_valued = true);
  PeriodicFunction(ReciprocalLattice rlat, Coefficients coeffs, bool real_valued);

  const ReciprocalLattice& rlat() const { return rlat_; }
  const Coefficients& coeffs() const { return coeffs_; }
  bool real_valued() const { return real_valued_; }

  Complex coefficient(const MillerIndex& m) const;
  void set(const MillerIndex& m, Complex value);
  void add(const MillerIndex& m, Complex value);

  /// c_0, the cell average.
  Complex mean() const { return coefficient({0, 0, 0}); }
  /// Largest |m_i| over the support (0 for an empty or constant function).
  int max_index() const;
  /// Largest deviation |c_{-k} - conj(c_k)| over the support.
  double hermiticity_defect() const;

  PeriodicFunction& operator+=(const PeriodicFunction& other);
  PeriodicFunction& operator-=(const PeriodicFunction& other);
  PeriodicFunction& operator*=(double s);

  friend PeriodicFunction operator+(PeriodicFunction a, const PeriodicFunction& b) { return a += b; }
  friend PeriodicFunction operator-(PeriodicFunction a, const PeriodicFunction& b) { return a -= b; }
  friend PeriodicFunction operator*(double s, PeriodicFunction a) { return a *= s; }

  /// Copy with the mean coefficient removed.
  PeriodicFunction without_mean() const;

 private:
  ReciprocalLattice rlat_;
  Coefficients coeffs_;
  bool real_valued_;
};

/// Values at x = sum_i (j_i/n) a_i, j_i in [0, n), row-major with j_3 fastest.
/// Exact for every n: the transform accumulates aliased coefficients.
std::vector<Complex> eval_on_grid(const PeriodicFunction& f, int n);

/// Flat index of (j1, j2, j3) in an eval_on_grid array.
inline std::size_t grid_index(int n, int j1, int j2, int j3) {
  return (static_cast<std::size_t>(j1) * n + j2) * n + j3;
}

/// max |f| over an n^3 grid. With n = 0 the grid starts at 2*max_index()+1 and
/// doubles until two successive estimates agree within 0.1%.
double sup_norm(const PeriodicFunction& f, int n = 0);

/// Density of a single orbital u = sum_G c_G e^{iG.x}, i.e. the coefficients of
/// |u|^2 / |cell|: g_k = (1/|cell|) sum_G conj(c_G) c_{G+k}.
PeriodicFunction autocorrelate(const PlaneWaveBasis& basis, std::span<const Complex> c);

/// Precomputed pair table for accumulating many autocorrelations on one basis.
/// Entry (i, j) is the slot of G_j - G_i in a dense box of differences.
class AutocorrelationPlan {
 public:
  explicit AutocorrelationPlan(const PlaneWaveBasis& basis);

  std::size_t slots() const { return box_ * box_ * box_; }
  /// acc[slot(G_j - G_i)] += weight * conj(c_i) c_j for all i, j.
  void accumulate(std::span<const Complex> c, double weight, std::vector<Complex>& acc) const;
  /// Converts an accumulator into a real-valued PeriodicFunction, scaled by `scale`.
  PeriodicFunction finish(const std::vector<Complex>& acc, double scale) const;

 private:
  const PlaneWaveBasis* basis_;
  int half_;
  int box_;
  std::vector<std::uint32_t> pair_slot_;
};

/// Text table: "# rlat <9 floats>" header then "m1 m2 m3 re im" rows.
void write_table(std::ostream& out, const PeriodicFunction& f);
/// Reads write_table output; the real-valued flag is set when the table is
/// Hermitian-symmetric within 1e-12.
PeriodicFunction read_table(std::istream& in);

}  // namespace bzconv
