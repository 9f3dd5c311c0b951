#include <doctest.h>

#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "bzconv/errors.hpp"
#include "bzconv/pseudopotential.hpp"
#include "bzconv/units.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace bzconv;
using namespace bzconv::cli;

namespace {

RunConfig from_text(const std::string& text, RunConfig base = RunConfig{}) {
  std::istringstream in(text);
  return apply_config(std::move(base), in);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

using Cx = std::complex<double>;

// Solves (a - shift) x = b by Gaussian elimination with partial pivoting.
std::vector<Cx> solve_shifted(std::vector<std::vector<Cx>> a, double shift, std::vector<Cx> b) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) a[i][i] -= shift;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Cx f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<Cx> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Cx s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Inverse iteration near `guess`, then the Rayleigh quotient of the result.
double rayleigh_refine(const std::vector<std::vector<Cx>>& h, double guess) {
  const std::size_t n = h.size();
  std::vector<Cx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = Cx(1.0 + 0.01 * i, 0.3 - 0.02 * i);
  for (int it = 0; it < 6; ++it) {
    x = solve_shifted(h, guess + 1e-7, x);
    double norm = 0.0;
    for (const Cx& v : x) norm += std::norm(v);
    for (Cx& v : x) v /= std::sqrt(norm);
  }
  Cx num{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) num += std::conj(x[i]) * h[i][j] * x[j];
  return num.real();
}

}  // namespace

TEST_CASE("energy parsing") {
  CHECK(parse_energy("27.211386 eV") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(parse_energy("2 Ha") == 2.0);
  CHECK(parse_energy(" 1.5ha ") == 1.5);
  CHECK(parse_energy("736eV") == doctest::Approx(736.0 / kHartreeInEv));
  CHECK_THROWS_AS(parse_energy("180"), ConfigError);
  CHECK_THROWS_AS(parse_energy("abc eV"), ConfigError);
  CHECK_THROWS_AS(parse_energy("1.0 Ry"), ConfigError);
}

TEST_CASE("presets") {
  const RunConfig desk = preset("si-fcc-desk");
  CHECK(hartree_to_ev(desk.ecutoff) == doctest::Approx(180.0));
  CHECK(desk.sizes == std::vector<int>{4, 6, 8, 10, 12});
  CHECK(desk.reference == 24);
  CHECK(desk.scf.nocc == 4);
  CHECK(desk.lattice_constant == 10.245);
  const RunConfig full = preset("si-fcc-paper");
  CHECK(hartree_to_ev(full.ecutoff) == doctest::Approx(736.0));
  CHECK(full.reference == 60);
  CHECK(full.sizes.back() == 28);
  CHECK(preset("paper-full").reference == 60);
  CHECK_THROWS_AS(preset("si-bcc"), ConfigError);
}

TEST_CASE("config parsing") {
  const RunConfig c = from_text(
      "# comment\n"
      "[lattice]\na = 10.0\n"
      "[basis]\necutoff = 3 Ha\n"
      "[model]\ntype = rhf\nnocc = 4\n"
      "[grid]\nsizes = 2, 4 6\nreference = 8\nL = 3\n"
      "[scf]\nmixing = 0.3\ntol_density = 1e-8\nmax_iter = 7\neigensolver = dense\n"
      "[bands]\nq = 0 0 0; 0.5 0 0.25\ncount = 5\n"
      "[output]\npath = out.csv\n"
      "[run]\nthreads = 2\n");
  CHECK(c.lattice_constant == 10.0);
  CHECK(c.ecutoff == 3.0);
  CHECK(c.model == Model::kRhf);
  CHECK(c.sizes == std::vector<int>{2, 4, 6});
  CHECK(c.reference == 8);
  CHECK(c.L == 3);
  CHECK(c.scf.mixing == 0.3);
  CHECK(c.scf.tol_density == 1e-8);
  CHECK(c.scf.max_iter == 7);
  CHECK(c.scf.solver.method == EigenMethod::kDense);
  REQUIRE(c.band_points.size() == 2);
  CHECK((c.band_points[1] - Vec3(0.5, 0, 0.25)).norm() == 0.0);
  CHECK(c.band_count == 5);
  CHECK(c.output == "out.csv");
  CHECK(c.threads == 2);

  const RunConfig v = from_text("[lattice]\nvectors = 1 0 0  0 2 0  0 0 3\n");
  CHECK(make_lattice(v).a(1) == Vec3(0, 2, 0));

  CHECK_THROWS_AS(from_text("[basis]\necut = 3 Ha\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(from_text("top = 1\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[scf]\nmixing = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[scf]\nmax_iter = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[model]\ntype = dft\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[lattice]\nvectors = 1 0 0\n"), ConfigError);
  CHECK_THROWS_AS(from_text("[basis]\necutoff = 3 Ha\necutoff = 4 Ha\n"), ConfigError);
}

TEST_CASE("bands: free electrons at q = 0") {
  RunConfig c = from_text("[model]\npotential = zero\n[basis]\necutoff = 2 Ha\n[bands]\ncount = 3\n");
  std::ostringstream out;
  cmd_bands(c, out);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[0][4]) == 0.0);
  // Next shell: the eight (+-1, +-1, +-1)-type vectors, 1/2 * 3 (2 pi / a)^2.
  const double unit = 2.0 * std::numbers::pi / c.lattice_constant;
  CHECK(std::stod(rows[1][4]) == doctest::Approx(1.5 * unit * unit).epsilon(1e-10));
}

TEST_CASE("bands: silicon gap at Gamma and a library-free eigenvalue oracle") {
  RunConfig c = from_text(
      "[basis]\necutoff = 70 eV\n[bands]\ncount = 5\nq = 0 0 0; 0.5 0.25 0\n[scf]\neigensolver = dense\n");
  std::ostringstream out;
  cmd_bands(c, out);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 10);
  CHECK(std::stod(rows[3][4]) < std::stod(rows[4][4]));
  for (const auto& row : rows)
    CHECK(std::stod(row[5]) == doctest::Approx(hartree_to_ev(std::stod(row[4]))).epsilon(1e-10));

  // Rebuild the fiber matrix entry by entry and refine each printed value.
  const Lattice lat = make_lattice(c);
  const ReciprocalLattice r = reciprocal(lat);
  const PlaneWaveBasis basis = build_basis(r, c.ecutoff);
  const PeriodicFunction v = cohen_bergstresser(lat, c.lattice_constant);
  for (std::size_t p = 0; p < 2; ++p) {
    const Vec3 alpha = c.band_points[p];
    const Vec3 q = alpha[0] * r.b(0) + alpha[1] * r.b(1) + alpha[2] * r.b(2);
    std::vector<std::vector<Cx>> h(basis.size(), std::vector<Cx>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        h[i][j] = v.coefficient(basis.miller(i) - basis.miller(j));
        if (i == j) h[i][j] += 0.5 * (basis.gvec(i) + q).squaredNorm();
      }
    for (int n = 0; n < 5; ++n) {
      const double printed = std::stod(rows[5 * p + n][4]);
      CHECK(std::abs(rayleigh_refine(h, printed) - printed) < 1e-8);
    }
  }
}

TEST_CASE("scf: linear mode, rHF fixed point and forced non-convergence") {
  const std::string base = "[basis]\necutoff = 50 eV\n[grid]\nL = 2\n";
  {
    std::ostringstream out, log;
    cmd_scf(from_text(base), out, log);
    CHECK(csv_rows(out.str()).size() == 1);
    CHECK(out.str().find("# converged=true, iterations=1") != std::string::npos);
  }
  {
    std::ostringstream out, log;
    cmd_scf(from_text(base + "[model]\ntype = rhf\n"), out, log);
    const std::string s = out.str();
    const auto pos = s.find("density_deviation_from_linear=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(s.substr(pos + 30)) < 10 * 1e-7);
  }
  {
    std::ostringstream out, log;
    CHECK_THROWS_AS(cmd_scf(from_text(base + "[model]\ntype = rhf\n[scf]\nmax_iter = 1\nmixing = 1\n"), out, log),
                    ConvergenceError);
  }
}

TEST_CASE("study output and determinism") {
  const std::string text = "[basis]\necutoff = 50 eV\n[grid]\nsizes = 3\nreference = 3\n";
  std::ostringstream a, log;
  cmd_study(from_text(text), a, log);
  CHECK(a.str().rfind("L,energy_error_ha,energy_error_ev,density_error_inf,wall_time_s\n", 0) == 0);
  const auto rows = csv_rows(a.str());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == "3");
  CHECK(std::stod(rows[0][1]) == 0.0);
  CHECK(std::stod(rows[0][3]) == 0.0);
  CHECK(a.str().find("# alpha_obs=nan") != std::string::npos);

  const std::string scan = "[basis]\necutoff = 50 eV\n[grid]\nsizes = 2, 3, 4\nreference = 8\n";
  std::ostringstream s1, s2;
  cmd_study(from_text(scan), s1, log);
  cmd_study(from_text(scan), s2, log);
  const auto r1 = csv_rows(s1.str());
  const auto r2 = csv_rows(s2.str());
  REQUIRE(r1.size() == 3);
  for (std::size_t i = 0; i < r1.size(); ++i)
    for (std::size_t col = 0; col < 4; ++col) CHECK(r1[i][col] == r2[i][col]);  // all but wall time
  CHECK(s1.str().find("# alpha_obs=") != std::string::npos);
  CHECK(s1.str().find("quantity=density") != std::string::npos);
}

TEST_CASE("bands and scf output is bitwise reproducible") {
  const RunConfig c = from_text("[basis]\necutoff = 50 eV\n[grid]\nL = 2\n[bands]\nq = 0.1 0.2 0.3\n[run]\nthreads = 2\n");
  std::ostringstream a, b, log;
  cmd_bands(c, a);
  cmd_bands(c, b);
  CHECK(a.str() == b.str());
  std::ostringstream c1, c2;
  cmd_scf(c, c1, log);
  cmd_scf(c, c2, log);
  CHECK(c1.str() == c2.str());
}

TEST_CASE("riemann-check report") {
  std::ostringstream out;
  cmd_riemann(from_text("[riemann]\nbeta = 0.5\nmax_L = 10\n"), out);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows) CHECK(std::stod(row[5]) < 1e-12);
  const std::string s = out.str();
  const double alpha = std::stod(s.substr(s.find("# alpha_obs=") + 12));
  CHECK(std::abs(alpha - 0.5) <= 0.025);
}

TEST_CASE("rate-bound table") {
  std::ostringstream out, log;
  cmd_rate_bound(from_text("[basis]\necutoff = 50 eV\n[grid]\nL = 2\n"), out, log);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 15);
  for (const auto& row : rows) {
    CHECK(std::isfinite(std::stod(row[1])));
    CHECK(std::stod(row[1]) > 0.0);
  }
}
