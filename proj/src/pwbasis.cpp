#include "bzconv/pwbasis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

#include "bzconv/errors.hpp"

namespace bzconv {

// ---------------------------------------------------------------------------
// PlaneWaveBasis

PlaneWaveBasis::PlaneWaveBasis(ReciprocalLattice rlat, double ecutoff,
                               std::vector<MillerIndex> millers)
    : rlat_(std::move(rlat)), ecutoff_(ecutoff), millers_(std::move(millers)) {
  gvecs_.reserve(millers_.size());
  index_.reserve(millers_.size());
  for (std::size_t i = 0; i < millers_.size(); ++i) {
    gvecs_.push_back(rlat_.vector(millers_[i]));
    index_.emplace(millers_[i], i);
    for (int d = 0; d < 3; ++d) max_index_ = std::max(max_index_, std::abs(millers_[i][d]));
  }
}

std::optional<std::size_t> PlaneWaveBasis::find(const MillerIndex& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PlaneWaveBasis build_basis(const ReciprocalLattice& rlat, double ecutoff, std::size_t max_size) {
  if (!(ecutoff > 0.0)) throw DomainError("energy cutoff must be positive");

  // |sum m_i b_i| >= sigma_min |m|_2 >= sigma_min |m_i|, so this box is exhaustive.
  const double gmax = std::sqrt(2.0 * ecutoff);
  const double bound = std::ceil(gmax / rlat.min_singular_value());
  if (bound > 1e4) throw ResourceError("energy cutoff too large for plane-wave enumeration");
  const int mmax = static_cast<int>(bound);

  std::vector<MillerIndex> millers;
  for (int m1 = -mmax; m1 <= mmax; ++m1) {
    for (int m2 = -mmax; m2 <= mmax; ++m2) {
      for (int m3 = -mmax; m3 <= mmax; ++m3) {
        const Vec3 g = rlat.vector({m1, m2, m3});
        if (0.5 * g.squaredNorm() < ecutoff) {
          millers.push_back({m1, m2, m3});
          if (millers.size() > max_size) {
            throw ResourceError("plane-wave basis exceeds the configured cap of " +
                                std::to_string(max_size) + " vectors");
          }
        }
      }
    }
  }
  return PlaneWaveBasis(rlat, ecutoff, std::move(millers));
}

// ---------------------------------------------------------------------------
// PeriodicFunction

PeriodicFunction::PeriodicFunction(ReciprocalLattice rlat, bool real_valued)
    : rlat_(std::move(rlat)), real_valued_(real_valued) {}

PeriodicFunction::PeriodicFunction(ReciprocalLattice rlat, Coefficients coeffs, bool real_valued)
    : rlat_(std::move(rlat)), coeffs_(std::move(coeffs)), real_valued_(real_valued) {}

Complex PeriodicFunction::coefficient(const MillerIndex& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Complex{} : it->second;
}

void PeriodicFunction::set(const MillerIndex& m, Complex value) {
  if (value == Complex{}) {
    coeffs_.erase(m);
  } else {
    coeffs_[m] = value;
  }
}

void PeriodicFunction::add(const MillerIndex& m, Complex value) { coeffs_[m] += value; }

int PeriodicFunction::max_index() const {
  int r = 0;
  for (const auto& [m, c] : coeffs_) {
    for (int d = 0; d < 3; ++d) r = std::max(r, std::abs(m[d]));
  }
  return r;
}

double PeriodicFunction::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& [m, c] : coeffs_) {
    worst = std::max(worst, std::abs(coefficient(-m) - std::conj(c)));
  }
  return worst;
}

PeriodicFunction& PeriodicFunction::operator+=(const PeriodicFunction& other) {
  if (!(rlat_ == other.rlat_)) throw DomainError("periodic functions on different lattices");
  for (const auto& [m, c] : other.coeffs_) coeffs_[m] += c;
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

PeriodicFunction& PeriodicFunction::operator-=(const PeriodicFunction& other) {
  if (!(rlat_ == other.rlat_)) throw DomainError("periodic functions on different lattices");
  for (const auto& [m, c] : other.coeffs_) coeffs_[m] -= c;
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

PeriodicFunction& PeriodicFunction::operator*=(double s) {
  for (auto& [m, c] : coeffs_) c *= s;
  return *this;
}

PeriodicFunction PeriodicFunction::without_mean() const {
  PeriodicFunction out = *this;
  out.coeffs_.erase({0, 0, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Real-space evaluation

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int wrap(int m, int n) {
  const int r = m % n;
  return r < 0 ? r + n : r;
}

}  // namespace

std::vector<Complex> eval_on_grid(const PeriodicFunction& f, int n) {
  if (n < 1) throw DomainError("grid resolution must be at least 1");
  std::vector<Complex> values(static_cast<std::size_t>(n) * n * n);
  // e^{ik.x} at x = sum (j_i/n) a_i is exp(2 pi i m.j / n); it depends on m
  // only modulo n, so folding coefficients before the transform is exact.
  for (const auto& [m, c] : f.coeffs()) {
    values[grid_index(n, wrap(m[0], n), wrap(m[1], n), wrap(m[2], n))] += c;
  }
  auto* data = reinterpret_cast<fftw_complex*>(values.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_3d(n, n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return values;
}

namespace {

struct GridScan {
  double max = 0.0;
  std::vector<std::size_t> peaks;  // local maxima of |f|, largest first
};

GridScan scan_grid(const PeriodicFunction& f, int n, std::size_t keep) {
  const std::vector<Complex> v = eval_on_grid(f, n);
  GridScan out;
  std::vector<std::pair<double, std::size_t>> peaks;
  auto wrap = [n](int j) { return (j + n) % n; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const std::size_t i = grid_index(n, a, b, c);
        const double x = std::abs(v[i]);
        out.max = std::max(out.max, x);
        const bool peak = x >= std::abs(v[grid_index(n, wrap(a + 1), b, c)]) &&
                          x >= std::abs(v[grid_index(n, wrap(a - 1), b, c)]) &&
                          x >= std::abs(v[grid_index(n, a, wrap(b + 1), c)]) &&
                          x >= std::abs(v[grid_index(n, a, wrap(b - 1), c)]) &&
                          x >= std::abs(v[grid_index(n, a, b, wrap(c + 1))]) &&
                          x >= std::abs(v[grid_index(n, a, b, wrap(c - 1))]);
        if (peak) peaks.emplace_back(x, i);
      }
  const std::size_t k = std::min(keep, peaks.size());
  std::partial_sort(peaks.begin(), peaks.begin() + k, peaks.end(), std::greater<>());
  for (std::size_t i = 0; i < k; ++i) out.peaks.push_back(peaks[i].second);
  return out;
}

// |f|^2 with its gradient and Hessian in fractional coordinates t (x = sum t_i a_i).
struct LocalModel {
  double value;
  Vec3 grad;
  Mat3 hess;
};

LocalModel local_model(const PeriodicFunction& f, const Vec3& t) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  Complex v{};
  Eigen::Vector3cd dv = Eigen::Vector3cd::Zero();
  Eigen::Matrix3cd hv = Eigen::Matrix3cd::Zero();
  for (const auto& [m, c] : f.coeffs()) {
    const Vec3 k = kTwoPi * Vec3(m[0], m[1], m[2]);
    const Complex e = c * std::polar(1.0, k.dot(t));
    v += e;
    dv += Complex(0.0, 1.0) * e * k;
    hv -= e * (k * k.transpose());
  }
  LocalModel out;
  out.value = std::norm(v);
  out.grad = 2.0 * (std::conj(v) * dv).real();
  out.hess = 2.0 * ((dv.conjugate() * dv.transpose()).real() + (std::conj(v) * hv).real());
  return out;
}

// Damped Newton ascent on |f|^2 from a grid peak.
double polish_peak(const PeriodicFunction& f, Vec3 t) {
  LocalModel m = local_model(f, t);
  for (int iter = 0; iter < 50; ++iter) {
    Vec3 step;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(m.hess);
    if (eig.eigenvalues().maxCoeff() < 0.0) {
      step = -m.hess.ldlt().solve(m.grad);
    } else {
      step = m.grad / std::max(1.0, m.hess.norm());
    }
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      const LocalModel trial = local_model(f, t + step);
      if (trial.value > m.value) {
        t += step;
        m = trial;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || step.norm() < 1e-13) break;
  }
  return std::sqrt(m.value);
}

}  // namespace

double sup_norm(const PeriodicFunction& f, int n) {
  if (f.coeffs().empty()) return 0.0;
  if (n > 0) return scan_grid(f, n, 0).max;

  // Doubling grids share their points, so two resolutions can agree while
  // both miss the true peak. The final grid's best local maxima are polished
  // by Newton ascent, which only ever raises the estimate.
  constexpr int kMaxResolution = 256;
  constexpr std::size_t kPolished = 8;
  int res = 2 * f.max_index() + 1;
  GridScan previous = scan_grid(f, res, kPolished);
  while (2 * res <= kMaxResolution) {
    GridScan current = scan_grid(f, 2 * res, kPolished);
    res *= 2;
    const bool agreed = std::abs(current.max - previous.max) <= 1e-3 * current.max;
    previous = std::move(current);
    if (agreed) break;
  }
  double best = previous.max;
  for (std::size_t i : previous.peaks) {
    const int j3 = static_cast<int>(i % res);
    const int j2 = static_cast<int>((i / res) % res);
    const int j1 = static_cast<int>(i / (static_cast<std::size_t>(res) * res));
    best = std::max(best, polish_peak(f, Vec3(j1, j2, j3) / res));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Autocorrelation

AutocorrelationPlan::AutocorrelationPlan(const PlaneWaveBasis& basis)
    : basis_(&basis), half_(2 * basis.max_index()), box_(2 * half_ + 1) {
  const std::size_t n = basis.size();
  pair_slot_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const MillerIndex& gi = basis.miller(i);
    for (std::size_t j = 0; j < n; ++j) {
      const MillerIndex d = basis.miller(j) - gi;
      pair_slot_[i * n + j] = static_cast<std::uint32_t>(
          ((d[0] + half_) * box_ + (d[1] + half_)) * box_ + (d[2] + half_));
    }
  }
}

void AutocorrelationPlan::accumulate(std::span<const Complex> c, double weight,
                                     std::vector<Complex>& acc) const {
  const std::size_t n = basis_->size();
  if (c.size() != n) throw DomainError("coefficient vector does not match basis size");
  if (acc.size() != slots()) acc.assign(slots(), Complex{});
  for (std::size_t i = 0; i < n; ++i) {
    const Complex ci = weight * std::conj(c[i]);
    if (ci == Complex{}) continue;
    const std::uint32_t* row = pair_slot_.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc[row[j]] += ci * c[j];
  }
}

PeriodicFunction AutocorrelationPlan::finish(const std::vector<Complex>& acc, double scale) const {
  PeriodicFunction::Coefficients coeffs;
  if (acc.empty()) return PeriodicFunction(basis_->rlat(), coeffs, true);
  for (int a = -half_; a <= half_; ++a) {
    for (int b = -half_; b <= half_; ++b) {
      for (int c = -half_; c <= half_; ++c) {
        const auto slot = [&](int x, int y, int z) {
          return static_cast<std::size_t>(((x + half_) * box_ + (y + half_)) * box_ + (z + half_));
        };
        const Complex v = acc[slot(a, b, c)];
        const Complex mirror = acc[slot(-a, -b, -c)];
        // Enforce g_{-k} = conj(g_k) exactly; the two sums agree up to rounding.
        const Complex sym = 0.5 * (v + std::conj(mirror)) * scale;
        if (sym != Complex{}) coeffs.emplace(MillerIndex{a, b, c}, sym);
      }
    }
  }
  return PeriodicFunction(basis_->rlat(), std::move(coeffs), true);
}

PeriodicFunction autocorrelate(const PlaneWaveBasis& basis, std::span<const Complex> c) {
  AutocorrelationPlan plan(basis);
  std::vector<Complex> acc;
  plan.accumulate(c, 1.0, acc);
  return plan.finish(acc, 1.0 / basis.rlat().cell_volume());
}

// ---------------------------------------------------------------------------
// Serialization

void write_table(std::ostream& out, const PeriodicFunction& f) {
  const auto old_precision = out.precision();
  out << std::setprecision(17) << "# rlat";
  for (int i = 0; i < 3; ++i) {
    for (int d = 0; d < 3; ++d) out << ' ' << f.rlat().b(i)[d];
  }
  out << '\n';
  for (const auto& [m, c] : f.coeffs()) {
    out << m[0] << ' ' << m[1] << ' ' << m[2] << ' ' << c.real() << ' ' << c.imag() << '\n';
  }
  out.precision(old_precision);
}

PeriodicFunction read_table(std::istream& in) {
  std::string line;
  std::optional<ReciprocalLattice> rlat;
  PeriodicFunction::Coefficients coeffs;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, tag;
      ss >> hash >> tag;
      if (tag != "rlat") continue;
      double v[9];
      for (double& x : v) {
        if (!(ss >> x)) throw ConfigError("malformed '# rlat' header in periodic function table");
      }
      rlat.emplace(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), Vec3(v[6], v[7], v[8]));
      continue;
    }
    MillerIndex m;
    double re = 0, im = 0;
    if (!(ss >> m[0] >> m[1] >> m[2] >> re >> im)) {
      throw ConfigError("malformed row " + std::to_string(lineno) + " in periodic function table");
    }
    coeffs[m] += Complex(re, im);
  }
  if (!rlat) throw ConfigError("periodic function table has no '# rlat' header");
  PeriodicFunction f(*rlat, std::move(coeffs), false);
  const bool real = f.hermiticity_defect() <= 1e-12;
  return PeriodicFunction(*rlat, f.coeffs(), real);
}

}  // namespace bzconv
