#pragma once

#include <span>
#include <vector>

namespace bzconv {

struct RatePoint {
  int L = 0;
  double error = 0.0;
};

/// Least-squares line through (L, ln error): ln error ~ log_c - alpha_obs L.
struct FitResult {
  double alpha_obs = 0.0;
  double log_c = 0.0;
  double r_squared = 0.0;
  /// alpha_obs > 0 beyond rounding.
  bool decaying = false;
  std::vector<int> used;
  /// Rows with error <= 0 (cannot enter a log fit).
  std::vector<int> dropped_zero;
  /// Smallest-L rows rejected as pre-asymptotic (see fit_rate).
  std::vector<int> dropped_transient;
};

/// Fits an exponential decay rate. Zero-error rows are dropped. Then, while
/// at least four rows remain, the smallest-L row is dropped if its deviation
/// from the line fitted to the other rows exceeds three residual standard
/// errors of that fit. Every drop is reported. Throws InsufficientDataError
/// with fewer than three usable rows.
FitResult fit_rate(std::span<const RatePoint> points);

}  // namespace bzconv
