// geoavg: simulate, sweep, bound and probe periodic systems on manifolds.

#include <iostream>

#include "CLI11.hpp"
#include "geoavg/cli.hpp"

using namespace geoavg;

namespace {

void add_common(CLI::App* c, cli::RunConfig& rc) {
  c->add_option("--system", rc.system, "builtin name (so3, torus, scalar, linear2) or definition file");
  c->add_option("--epsilon", rc.epsilons, "perturbation size; repeat for sweeps");
  c->add_option("--t0", rc.t0, "initial time (default from system)");
  c->add_option("--horizon", rc.horizon, "integration span t1 - t0");
  c->add_option("--horizon-constant", rc.horizon_constant, "span c/eps");
  c->add_option("--step", rc.step, "integrator step (default min(1e-2, T/200))");
  c->add_option("--nodes", rc.nodes, "Simpson panels for averaging")->capture_default_str();
  c->add_option("--samples", rc.samples, "output / distance samples");
  c->add_option("--out", rc.out, "output directory")->capture_default_str();
  c->add_option("--seed", rc.seed, "seed for shooting restarts")->capture_default_str();
  c->add_flag("--strict", rc.strict, "nonzero exit on failed or inconclusive verdicts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaging of periodic systems on Riemannian manifolds"};
  app.require_subcommand(1);
  cli::RunConfig rc;
  bool serial = false;

  auto* sim = app.add_subcommand("simulate", "nominal and averaged trajectories with their distance");
  add_common(sim, rc);
  auto* sweep = app.add_subcommand("sweep", "sup distance over an epsilon list with log-log slope fit");
  add_common(sweep, rc);
  sweep->add_flag("--long-horizon", rc.long_horizon, "stability-gated long-horizon sweep");
  sweep->add_option("--center", rc.center, "equilibrium of the averaged field");
  sweep->add_option("--radius", rc.radii, "stability probe radii");
  sweep->add_flag("--serial", serial, "run epsilon values one after another");
  auto* bound = app.add_subcommand("bound", "check the Gronwall finite-horizon bound");
  add_common(bound, rc);
  auto* probe = app.add_subcommand("probe", "stability probe of the averaged field");
  add_common(probe, rc);
  probe->add_option("--center", rc.center, "equilibrium of the averaged field");
  probe->add_option("--radius", rc.radii, "probe radii");
  probe->add_option("--probe-horizon", rc.probe_horizon, "probe integration time");
  auto* list = app.add_subcommand("list", "list builtin systems");
  std::string export_name, export_path;
  auto* exp = app.add_subcommand("export", "write a builtin's system-definition file");
  exp->add_option("name", export_name, "builtin name")->required();
  exp->add_option("path", export_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }
  rc.parallel = !serial;

  try {
    if (*sim) return cli::cmd_simulate(rc);
    if (*sweep) {
      if (!rc.horizon && !rc.horizon_constant) rc.horizon_constant = 10.0;
      return cli::cmd_sweep(rc);
    }
    if (*bound) return cli::cmd_bound(rc);
    if (*probe) return cli::cmd_probe(rc);
    if (*list) {
      for (const auto& n : builtin_names()) std::cout << n << "\n";
      return 0;
    }
    if (*exp) return cli::cmd_export(export_name, export_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const EscapeError& e) {
    std::cerr << "escape: " << e.what() << "\n";
    return cli::kEscape;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
