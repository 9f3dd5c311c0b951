// bzconv: plane-wave band structure and Brillouin-zone sampling convergence.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "bzconv/errors.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

enum ExitCode {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kNoConvergence = 3,
  kMetallic = 4,
  kNumerical = 5,
};

}  // namespace

int main(int argc, char** argv) {
  using namespace bzconv;
  using namespace bzconv::cli;

  CLI::App app{"Plane-wave periodic Hamiltonians and k-grid convergence studies"};
  app.require_subcommand(1);
  std::string config_path;
  std::string preset_name = "si-fcc-desk";
  std::string out_path;
  int threads = -1;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "si-fcc-desk (default) or si-fcc-paper");
  app.add_option("--out", out_path, "output file (default: stdout, or output.path)");
  app.add_option("--threads", threads, "worker threads for fiber solves (0 = all cores)");
  app.fallthrough();

  CLI::App* bands = app.add_subcommand("bands", "eigenvalues at the configured q points");
  CLI::App* scf = app.add_subcommand("scf", "self-consistent (or linear) ground state on one grid");
  CLI::App* study = app.add_subcommand("study", "energy and density errors against a reference grid");
  CLI::App* rate = app.add_subcommand("rate-bound", "explicit constants of the exponential bound");
  CLI::App* riemann = app.add_subcommand("riemann-check", "aliasing identity for Riemann sums");
  for (CLI::App* sub : {bands, scf, study, rate, riemann}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    RunConfig config = preset(preset_name);
    if (!config_path.empty()) config = apply_config_file(std::move(config), config_path);
    if (!out_path.empty()) config.output = out_path;
    if (threads >= 0) config.threads = threads;
    validate(config);

    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) throw ConfigError("cannot write " + config.output);
    }
    std::ostream& out = config.output.empty() ? std::cout : file;

    if (*bands) cmd_bands(config, out);
    if (*scf) cmd_scf(config, out, std::cerr);
    if (*study) cmd_study(config, out, std::cerr);
    if (*rate) cmd_rate_bound(config, out, std::cerr);
    if (*riemann) cmd_riemann(config, out);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DegenerateLatticeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ResourceError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const MetallicError& e) {
    std::cerr << "gap failure: " << e.what() << '\n';
    return kMetallic;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
