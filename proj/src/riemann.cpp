#include "bzconv/riemann.hpp"

#include <cmath>
#include <numbers>

#include "bzconv/bloch.hpp"
#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum_k r^|k| e^{ik theta} = (1 - r^2) / (1 - 2 r cos theta + r^2).
double poisson_kernel(double r, double theta) {
  return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(theta) + r * r);
}

void check(const ExponentialLatticeSeries& s) {
  if (!(s.beta > 0.0)) throw DomainError("exponential series needs beta > 0");
}

}  // namespace

Complex series_value(const LatticeSeries& series, const Vec3& alpha) {
  return std::visit(
      [&](const auto& s) -> Complex {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteLatticeSeries>) {
          Complex sum{};
          for (const auto& [k, c] : s.coeffs) {
            const double phase = kTwoPi * (k[0] * alpha[0] + k[1] * alpha[1] + k[2] * alpha[2]);
            sum += c * std::polar(1.0, phase);
          }
          return sum;
        } else {
          check(s);
          const double r = std::exp(-s.beta);
          return s.kappa * poisson_kernel(r, kTwoPi * alpha[0]) *
                 poisson_kernel(r, kTwoPi * alpha[1]) * poisson_kernel(r, kTwoPi * alpha[2]);
        }
      },
      series);
}

Complex series_mean(const LatticeSeries& series) {
  return std::visit(
      [](const auto& s) -> Complex {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteLatticeSeries>) {
          auto it = s.coeffs.find({0, 0, 0});
          return it == s.coeffs.end() ? Complex{} : it->second;
        } else {
          return s.kappa;
        }
      },
      series);
}

RiemannCheck riemann_check(const LatticeSeries& series, int L) {
  RiemannCheck out;
  out.L = L;

  // Quadrature side: evaluate on the grid.
  std::complex<long double> sum{};
  for (const MillerIndex& m : kgrid_indices(L)) {
    const Vec3 alpha(static_cast<double>(m[0]) / L, static_cast<double>(m[1]) / L,
                     static_cast<double>(m[2]) / L);
    const Complex v = series_value(series, alpha);
    sum += std::complex<long double>(v.real(), v.imag());
  }
  const long double n = static_cast<long double>(L) * L * L;
  const Complex mean = series_mean(series);
  out.lhs = Complex(static_cast<double>(sum.real() / n), static_cast<double>(sum.imag() / n)) - mean;

  // Alias side: coefficients on the sublattice L * Z^3 minus the origin.
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteLatticeSeries>) {
          Complex acc{};
          for (const auto& [k, c] : s.coeffs) {
            if (k == MillerIndex{0, 0, 0}) continue;
            if (k[0] % L == 0 && k[1] % L == 0 && k[2] % L == 0) acc += c;
          }
          out.rhs = acc;
        } else {
          check(s);
          // Truncate where a single coefficient falls below 1e-22 kappa.
          const double step = s.beta * L;
          const int kmax = static_cast<int>(std::ceil(50.0 / step));
          std::vector<long double> decay(kmax + 1);
          for (int k = 0; k <= kmax; ++k) decay[k] = std::exp(-static_cast<long double>(step) * k);
          long double acc = 0.0L;
          for (int k1 = kmax; k1 >= -kmax; --k1) {
            for (int k2 = kmax; k2 >= -kmax; --k2) {
              for (int k3 = kmax; k3 >= -kmax; --k3) {
                if (k1 == 0 && k2 == 0 && k3 == 0) continue;
                acc += decay[std::abs(k1)] * decay[std::abs(k2)] * decay[std::abs(k3)];
              }
            }
          }
          out.rhs = static_cast<double>(s.kappa * acc);
        }
      },
      series);
  return out;
}

}  // namespace bzconv
