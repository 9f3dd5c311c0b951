#include "bzconv/fit.hpp"

#include <algorithm>
#include <cmath>

#include "bzconv/errors.hpp"

namespace bzconv {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  Line line;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    line.ss_tot += (y[i] - my) * (y[i] - my);
  }
  line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  line.intercept = my - line.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    line.ss_res += r * r;
  }
  return line;
}

}  // namespace

FitResult fit_rate(std::span<const RatePoint> points) {
  std::vector<RatePoint> rows(points.begin(), points.end());
  std::sort(rows.begin(), rows.end(), [](const RatePoint& a, const RatePoint& b) { return a.L < b.L; });

  FitResult fit;
  std::vector<double> x, y;
  for (const RatePoint& p : rows) {
    if (p.error > 0.0 && std::isfinite(p.error)) {
      x.push_back(p.L);
      y.push_back(std::log(p.error));
      fit.used.push_back(p.L);
    } else {
      fit.dropped_zero.push_back(p.L);
    }
  }
  if (x.size() < 3) {
    throw InsufficientDataError("fit_rate needs at least 3 rows with positive error, got " +
                                std::to_string(x.size()));
  }

  // Leave-one-out rejection of the leading (smallest L) rows.
  std::size_t first = 0;
  while (x.size() - first >= 4) {
    const std::span<const double> xs(x.data() + first + 1, x.size() - first - 1);
    const std::span<const double> ys(y.data() + first + 1, y.size() - first - 1);
    const Line rest = least_squares(xs, ys);
    const double sigma = std::sqrt(rest.ss_res / static_cast<double>(xs.size() - 2));
    const double deviation = std::abs(y[first] - (rest.intercept + rest.slope * x[first]));
    if (deviation <= std::max(3.0 * sigma, 1e-9)) break;
    fit.dropped_transient.push_back(fit.used.front());
    fit.used.erase(fit.used.begin());
    ++first;
  }

  const Line line = least_squares(std::span<const double>(x.data() + first, x.size() - first),
                                  std::span<const double>(y.data() + first, y.size() - first));
  fit.alpha_obs = -line.slope;
  fit.log_c = line.intercept;
  fit.r_squared = line.ss_tot > 0.0 ? std::clamp(1.0 - line.ss_res / line.ss_tot, 0.0, 1.0) : 1.0;
  fit.decaying = fit.alpha_obs > 1e-10;
  return fit;
}

}  // namespace bzconv
