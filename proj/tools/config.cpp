#include "config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bzconv/errors.hpp"
#include "bzconv/units.hpp"

namespace bzconv::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"lattice", {"preset", "a", "vectors"}},
      {"basis", {"ecutoff"}},
      {"model", {"type", "potential", "nocc", "kmax2"}},
      {"grid", {"sizes", "reference", "L"}},
      {"scf", {"mixing", "tol_density", "max_iter", "gap_tolerance", "anderson_depth", "eigensolver",
               "initial_density"}},
      {"bands", {"q", "count"}},
      {"riemann", {"kappa", "beta", "max_L"}},
      {"output", {"path", "checkpoint", "plot"}},
      {"run", {"threads"}},
  };
  return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw ConfigError(key + " = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "not a number");
  }
  if (used != v.size() || !std::isfinite(x)) bad(key, v, "not a number");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(v, &used);
  } catch (const std::exception&) {
    bad(key, v, "not an integer");
  }
  if (used != v.size()) bad(key, v, "not an integer");
  return x;
}

std::vector<std::string> tokens(const std::string& v, const char* separators) {
  std::vector<std::string> out;
  boost::split(out, v, boost::is_any_of(separators), boost::token_compress_on);
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

std::vector<double> doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& t : tokens(v, " ,\t")) out.push_back(to_double(key, t));
  return out;
}

void set_value(RunConfig& c, const std::string& section, const std::string& key, std::string v) {
  boost::trim(v);
  const std::string name = section + "." + key;
  if (name == "lattice.preset") {
    if (v != "si-fcc") bad(name, v, "only si-fcc is built in");
    c.lattice_vectors.reset();
  } else if (name == "lattice.a") {
    c.lattice_constant = to_double(name, v);
  } else if (name == "lattice.vectors") {
    const std::vector<double> x = doubles(name, v);
    if (x.size() != 9) bad(name, v, "expected 9 numbers (a1, a2, a3 in Bohr)");
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(j, i) = x[3 * i + j];
    c.lattice_vectors = m;
  } else if (name == "basis.ecutoff") {
    c.ecutoff = parse_energy(v);
  } else if (name == "model.type") {
    if (v == "linear") c.model = Model::kLinear;
    else if (v == "rhf") c.model = Model::kRhf;
    else bad(name, v, "expected linear or rhf");
  } else if (name == "model.potential") {
    if (v == "cohen-bergstresser") c.potential = PotentialKind::kCohenBergstresser;
    else if (v == "zero") c.potential = PotentialKind::kZero;
    else bad(name, v, "expected cohen-bergstresser or zero");
  } else if (name == "model.nocc") {
    c.scf.nocc = to_int(name, v);
  } else if (name == "model.kmax2") {
    c.kmax2 = to_int(name, v);
  } else if (name == "grid.sizes") {
    c.sizes.clear();
    for (const std::string& t : tokens(v, " ,\t")) c.sizes.push_back(to_int(name, t));
  } else if (name == "grid.reference") {
    c.reference = to_int(name, v);
  } else if (name == "grid.L") {
    c.L = to_int(name, v);
  } else if (name == "scf.mixing") {
    c.scf.mixing = to_double(name, v);
  } else if (name == "scf.tol_density") {
    c.scf.tol_density = to_double(name, v);
  } else if (name == "scf.max_iter") {
    c.scf.max_iter = to_int(name, v);
  } else if (name == "scf.gap_tolerance") {
    c.scf.gap_tolerance = parse_energy(v);
  } else if (name == "scf.anderson_depth") {
    c.scf.anderson_depth = to_int(name, v);
  } else if (name == "scf.eigensolver") {
    if (v == "auto") c.scf.solver.method = EigenMethod::kAuto;
    else if (v == "dense") c.scf.solver.method = EigenMethod::kDense;
    else if (v == "davidson") c.scf.solver.method = EigenMethod::kDavidson;
    else bad(name, v, "expected auto, dense or davidson");
  } else if (name == "scf.initial_density") {
    if (v.empty()) bad(name, v, "empty");
    c.initial_density = v;
  } else if (name == "bands.q") {
    c.band_points.clear();
    for (const std::string& point : tokens(v, ";")) {
      const std::vector<double> x = doubles(name, point);
      if (x.size() != 3) bad(name, v, "each point needs 3 fractional coordinates");
      c.band_points.emplace_back(x[0], x[1], x[2]);
    }
  } else if (name == "bands.count") {
    c.band_count = to_int(name, v);
  } else if (name == "riemann.kappa") {
    c.riemann_kappa = to_double(name, v);
  } else if (name == "riemann.beta") {
    c.riemann_beta = to_double(name, v);
  } else if (name == "riemann.max_L") {
    c.riemann_max_L = to_int(name, v);
  } else if (name == "output.path") {
    c.output = v;
  } else if (name == "output.checkpoint") {
    c.checkpoint = v;
  } else if (name == "output.plot") {
    c.plot = v;
  } else if (name == "run.threads") {
    c.threads = to_int(name, v);
  }
}

}  // namespace

double parse_energy(const std::string& text) {
  std::string v = boost::trim_copy(text);
  double scale = 0.0;
  if (boost::iends_with(v, "ev")) {
    scale = 1.0 / kHartreeInEv;
    v.resize(v.size() - 2);
  } else if (boost::iends_with(v, "ha")) {
    scale = 1.0;
    v.resize(v.size() - 2);
  } else {
    throw ConfigError("energy '" + text + "' needs a unit suffix (eV or Ha)");
  }
  boost::trim(v);
  return scale * to_double("energy", v);
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "si-fcc-desk") return c;
  if (name == "si-fcc-paper" || name == "paper-full") {
    c.ecutoff = ev_to_hartree(736.0);
    c.sizes.clear();
    for (int L = 4; L <= 28; L += 2) c.sizes.push_back(L);
    c.reference = 60;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "' (expected si-fcc-desk or si-fcc-paper)");
}

RunConfig apply_config(RunConfig base, std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, keys] : tree) {
    auto known = schema().find(section);
    if (known == schema().end()) {
      if (keys.empty()) throw ConfigError("config: key '" + section + "' outside a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : keys) {
      if (!known->second.contains(key))
        throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      set_value(base, section, key, value.data());
    }
  }
  validate(base);
  return base;
}

RunConfig apply_config_file(RunConfig base, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return apply_config(std::move(base), in);
}

void validate(const RunConfig& c) {
  if (!(c.lattice_constant > 0.0)) throw ConfigError("lattice.a must be positive");
  if (!(c.ecutoff > 0.0)) throw ConfigError("basis.ecutoff must be positive");
  if (c.sizes.empty()) throw ConfigError("grid.sizes is empty");
  for (int L : c.sizes)
    if (L < 1) throw ConfigError("grid.sizes must be positive");
  if (c.reference < 1) throw ConfigError("grid.reference must be positive");
  if (c.L < 1) throw ConfigError("grid.L must be positive");
  if (c.band_count < 1) throw ConfigError("bands.count must be positive");
  if (c.band_points.empty()) throw ConfigError("bands.q is empty");
  if (!(c.riemann_beta > 0.0)) throw ConfigError("riemann.beta must be positive");
  if (c.riemann_max_L < 1) throw ConfigError("riemann.max_L must be positive");
  if (c.threads < 0) throw ConfigError("run.threads must be >= 0 (0 = all cores)");
  if (c.kmax2 < 0) throw ConfigError("model.kmax2 must be nonnegative");
  c.scf.validate();
}

Lattice make_lattice(const RunConfig& c) {
  if (c.lattice_vectors) return Lattice(*c.lattice_vectors);
  return silicon_fcc(c.lattice_constant);
}

}  // namespace bzconv::cli
