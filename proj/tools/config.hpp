#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bzconv/lattice.hpp"
#include "bzconv/rhf.hpp"
#include "bzconv/study.hpp"
#include "bzconv/units.hpp"

namespace bzconv::cli {

enum class PotentialKind { kCohenBergstresser, kZero };

/// Fully resolved run parameters. Defaults are the si-fcc-desk preset.
struct RunConfig {
  // [lattice]
  double lattice_constant = 10.245;        ///< Bohr; also scales the form factors
  std::optional<Mat3> lattice_vectors;     ///< columns; fcc from `lattice_constant` when unset
  // [basis]
  double ecutoff = ev_to_hartree(180.0);  ///< Hartree
  // [model]
  Model model = Model::kLinear;
  PotentialKind potential = PotentialKind::kCohenBergstresser;
  int kmax2 = 11;
  // [grid]
  std::vector<int> sizes = {4, 6, 8, 10, 12};
  int reference = 24;
  int L = 8;  ///< single-grid commands (scf, rate-bound)
  // [scf]
  SCFConfig scf;
  std::string initial_density = "uniform";  ///< uniform | linear | <checkpoint path>
  // [bands]
  std::vector<Vec3> band_points = {Vec3::Zero()};  ///< fractional coordinates
  int band_count = 8;
  // [riemann]
  double riemann_kappa = 1.0;
  double riemann_beta = 0.5;
  int riemann_max_L = 10;
  // [output]
  std::string output;      ///< empty: stdout
  std::string checkpoint;  ///< scf density table
  std::string plot;        ///< gnuplot script for study
  // [run]
  int threads = 1;
};

/// Known presets: si-fcc-desk, si-fcc-paper (alias paper-full).
RunConfig preset(const std::string& name);

/// Applies an INI-style file on top of `base`. Unknown sections or keys,
/// malformed values and missing energy units throw ConfigError.
RunConfig apply_config(RunConfig base, std::istream& in);
RunConfig apply_config_file(RunConfig base, const std::filesystem::path& path);

/// "180 eV", "6.6 Ha", "6.6Ha" -> Hartree.
double parse_energy(const std::string& text);

void validate(const RunConfig& config);

/// The real-space lattice the config describes.
Lattice make_lattice(const RunConfig& config);

}  // namespace bzconv::cli
