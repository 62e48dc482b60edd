// lvn_main.cpp — command-line front end: one subcommand per scenario kind,
// JSON config in, CSV/JSON artifacts out.
//
// Exit codes: 0 all checks pass (or --check not given and the run completed),
// 2 invalid configuration or usage, 3 numeric guard breach or, with --check,
// any failed acceptance threshold.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lvn/core.hpp"
#include "lvn/scenario.hpp"

namespace {

int run_kind(const std::string& kind, const std::string& config_path,
             const std::string& out_dir, bool check) {
  try {
    const lvn::ScenarioConfig cfg = lvn::parse_config_file(config_path);
    if (cfg.kind != kind) {
      std::cerr << "error: config kind \"" << cfg.kind
                << "\" does not match subcommand \"" << kind << "\"\n";
      return 2;
    }
    lvn::ScenarioOutput out = lvn::run_scenario(cfg);
    const std::vector<std::string> manifest = lvn::write_outputs(out, out_dir);

    int failed = 0;
    for (const auto& [name, c] : out.report.checks) {
      std::printf("%-22s value %-14.6g threshold %-10.6g %s\n", name.c_str(),
                  c.value, c.threshold, c.pass ? "pass" : "FAIL");
      if (!c.pass) ++failed;
    }
    for (const std::string& path : manifest)
      std::printf("wrote %s\n", path.c_str());
    std::printf("%s: %zu checks, %d failed, %.3f s\n", kind.c_str(),
                out.report.checks.size(), failed,
                out.report.duration_seconds);
    if (check && failed > 0) {
      std::cerr << "error: " << failed << " check(s) outside threshold\n";
      return 3;
    }
    return 0;
  } catch (const lvn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lvn::NumericGuardError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lvn — invariant, density-matrix and factorization scenarios with "
      "reproducible CSV/JSON output"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::string out = "out";
    bool check = false;
  };
  const std::string kinds[] = {"rabi", "invariant", "reduce", "susy"};
  const std::string blurbs[] = {
      "two-level Rabi oscillation: RK4 density matrix vs closed form, "
      "state propagation and invariant assembly",
      "driven two-level invariant: transport residual, constant spectrum, "
      "phase-dressed solution fidelity",
      "rotating-frame reduction: time-independent invariant, diagonal "
      "reduced Hamiltonian, phases from its diagonal",
      "superpotential factorization: partner potentials and spectra, "
      "ladder annihilation, shift identity"};
  SubArgs args[4];
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i], blurbs[i]);
    sub->add_option("--config", args[i].config, "path to the JSON config")
        ->required();
    sub->add_option("--out", args[i].out,
                    "output directory (default: ./out)");
    sub->add_flag("--check", args[i].check,
                  "exit 3 if any acceptance threshold fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are configuration errors
  }

  for (int i = 0; i < 4; ++i)
    if (app.get_subcommand(kinds[i])->parsed())
      return run_kind(kinds[i], args[i].config, args[i].out, args[i].check);
  return 2;  // unreachable: require_subcommand(1)
}
