// Command-line front end: simulate, sweep-phase, oracle.
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "atomgate/commands.hpp"

int main(int argc, char** argv) {
  using namespace atomgate;

  CLI::App app{"Positive-P and mean-field simulation of a four-well atomtronic gate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "atomgate " ATOMGATE_VERSION);

  unsigned workers = 0;
  app.add_option("--workers", workers, "Worker threads (0: ATOMGATE_WORKERS or all cores)");

  SimulateOptions sim;
  std::optional<std::uint64_t> n_traj, seed;
  std::optional<std::string> series, summary, manifest;
  bool no_progress = false;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write CSV, summary and manifest");
  simulate->add_option("kind", sim.kind, "gpe or pp")->required()->check(CLI::IsMember({"gpe", "pp"}));
  simulate->add_option("input", sim.input_path, "Config file or manifest")->required();
  simulate->add_option("--n-traj", n_traj, "Override ensemble.n_traj");
  simulate->add_option("--seed", seed, "Override ensemble.seed");
  simulate->add_option("--series", series, "Series CSV path");
  simulate->add_option("--summary", summary, "Summary JSON path");
  simulate->add_option("--manifest", manifest, "Manifest JSON path");
  simulate->add_flag("--no-progress", no_progress, "Silence progress on stderr");

  SweepOptions sweep;
  std::optional<std::uint64_t> sweep_n_traj;
  std::optional<std::string> sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep-phase", "Transfer efficiency against the control phase");
  sweep_cmd->add_option("config", sweep.config_path, "Config file")->required();
  sweep_cmd->add_option("--phases", sweep.phases, "Grid: 0,pi/2,pi or start:stop:count")->required();
  sweep_cmd->add_option("--kind", sweep.kind, "gpe or pp")->check(CLI::IsMember({"gpe", "pp"}));
  sweep_cmd->add_option("--mode", sweep.mode, "Well that receives the phase (1-based)");
  sweep_cmd->add_option("--n-traj", sweep_n_traj, "Override ensemble.n_traj");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV (default stdout)");

  OracleOptions orc;
  std::optional<std::string> orc_config, orc_atoms;
  std::optional<std::size_t> orc_modes;
  std::optional<double> orc_t;
  auto* oracle = app.add_subcommand("oracle", "Reference solutions: linear mean field or truncated Fock space");
  oracle->add_option("kind", orc.kind, "linear or fock")->required()->check(CLI::IsMember({"linear", "fock"}));
  oracle->add_flag("--gate", orc.gate, "Use the four-well gate lattice");
  oracle->add_option("--config", orc_config, "Take lattice and initial state from a config file");
  oracle->add_option("--modes", orc_modes, "Chain of this many modes");
  oracle->add_option("--atoms", orc_atoms, "Per-mode atoms, comma separated");
  oracle->add_option("--J", orc.J, "Tunnelling");
  oracle->add_option("--chi", orc.chi, "On-site interaction");
  oracle->add_option("--theta", orc.theta, "Phase on well 3 (gate only)");
  oracle->add_option("--t", orc_t, "Single output time");
  oracle->add_option("--t-final", orc.t_final, "End of the output grid");
  oracle->add_option("--dt", orc.dt, "Output grid spacing");
  oracle->add_option("--nmax", orc.n_max, "Per-mode occupation cutoff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::kConfig;
  }

  if (*simulate) {
    sim.n_traj = n_traj;
    sim.seed = seed;
    sim.series_path = series;
    sim.summary_path = summary;
    sim.manifest_path = manifest;
    sim.workers = workers;
    sim.progress = !no_progress && isatty(STDERR_FILENO);
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    sweep.n_traj = sweep_n_traj;
    sweep.out_path = sweep_out;
    sweep.workers = workers;
    return cmd_sweep_phase(sweep, std::cout, std::cerr);
  }
  orc.config_path = orc_config;
  orc.atoms = orc_atoms;
  orc.modes = orc_modes;
  orc.t = orc_t;
  return cmd_oracle(orc, std::cout, std::cerr);
}
