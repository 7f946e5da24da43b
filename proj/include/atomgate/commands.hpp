#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atomgate/config.hpp"
#include "atomgate/ensemble.hpp"
#include "atomgate/observables.hpp"

namespace atomgate {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kUnreliable = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

enum class RunKind { Gpe, Pp };
std::optional<RunKind> parse_run_kind(std::string_view name) noexcept;
std::string_view run_kind_name(RunKind kind) noexcept;

struct SimulationResult {
  NumberSeries series;
  std::optional<EnsembleStats> stats;  // positive-P runs only
  double wall_seconds = 0.0;
  bool reliable() const { return !stats || stats->reliable(); }
};

/// GPE runs force the RK4 scheme; positive-P runs upgrade a configured rk4
/// to rk4-maruyama and keep any other stochastic scheme.
IntegratorConfig effective_integrator(const RunConfig& config, RunKind kind);

SimulationResult run_simulation(const RunConfig& config, RunKind kind, unsigned workers = 0,
                                const std::function<void(std::uint64_t, std::uint64_t)>& progress = {});

struct SimulateOptions {
  std::string kind;
  std::string input_path;  // config file or a manifest written by a previous run
  std::optional<std::uint64_t> n_traj;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> series_path;
  std::optional<std::string> summary_path;
  std::optional<std::string> manifest_path;
  unsigned workers = 0;
  bool progress = false;
};
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
  std::string kind = "gpe";
  std::string config_path;
  std::string phases;
  std::size_t mode = 3;  // 1-based well receiving the phase
  std::optional<std::uint64_t> n_traj;
  std::optional<std::string> out_path;  // stdout when unset
  unsigned workers = 0;
};

struct SweepRow {
  double theta = 0.0;
  Transfer transfer;
  bool reliable = true;
};
/// Rows sorted by theta. Throws ConfigError on fewer than two phases.
std::vector<SweepRow> sweep_phase(const RunConfig& base, RunKind kind, std::vector<double> phases,
                                  std::size_t phase_mode, unsigned workers = 0);
std::string sweep_csv(const std::vector<SweepRow>& rows);
int cmd_sweep_phase(const SweepOptions& options, std::ostream& out, std::ostream& err);

struct OracleOptions {
  std::string kind;
  bool gate = false;
  std::optional<std::string> config_path;
  std::optional<std::size_t> modes;
  std::optional<std::string> atoms;  // comma list
  double J = 1.0;
  double chi = 0.0;
  double theta = 0.0;  // applied to well 3 of the gate
  std::optional<double> t;
  double t_final = 5.0;
  double dt = 0.01;
  int n_max = -1;
};
/// Prints `t,N1,...,Nn` to `out`.
int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err);

}  // namespace atomgate
