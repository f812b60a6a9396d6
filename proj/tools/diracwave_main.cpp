// diracwave command-line tool.
//
//   diracwave <subcommand> --config <path> [--out <path>] [--format csv|json]
//             [--set key=value ...]
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diracwave/diracwave.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Relativistic fermion states in a circularly polarized wave "
               "and constant magnetic field"};
  app.require_subcommand(1);

  std::string config_path, out_path, format_override;
  std::vector<std::string> sets;

  const std::vector<std::string> names{"solve",      "expand", "state",
                                       "observables", "timeseries", "frames",
                                       "sweep"};
  const std::vector<std::string> descr{
      "characteristic roots at the singular momentum",
      "singular-point series vs the exact root, both branches",
      "build one state: energy, envelope, norms, Dirac residual",
      "closed-form averages vs the quadrature oracle",
      "momentum/spin traces with the Pauli reference columns",
      "quantization, primed parameters, phase identity, n=0 condition",
      "scalar observable over a parameter range"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descr[i]);
    sub->add_option("--config", config_path, "flat key = value config file")
        ->required();
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--format", format_override, "csv or json");
    sub->add_option("--set", sets, "override config keys, key=value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e); // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    diracwave::RunConfig rc = diracwave::load_config_file(config_path, sets);
    if (!format_override.empty()) {
      if (format_override != "csv" && format_override != "json")
        throw std::domain_error("--format must be csv or json");
      rc.format = format_override;
    }
    const diracwave::EmittedTable table = diracwave::run(rc, subcommand);
    diracwave::emit(table, rc.format, out_path);
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
