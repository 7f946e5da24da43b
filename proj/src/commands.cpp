#include "atomgate/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "atomgate/error.hpp"
#include "atomgate/initial_states.hpp"
#include "atomgate/output.hpp"
#include "atomgate/verification.hpp"

namespace atomgate {
namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) fmt::print(err, "config error: {}\n", msg);
    return exit_code::kConfig;
  } catch (const ValidationError& e) {
    for (const auto& msg : e.violations()) fmt::print(err, "invalid lattice: {}\n", msg);
    return exit_code::kConfig;
  } catch (const TruncationError& e) {
    fmt::print(err, "error: {} (try --nmax {})\n", e.what(), e.suggested_n_max());
    return exit_code::kConfig;
  } catch (const DomainError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code::kConfig;
  } catch (const UnavailableError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code::kConfig;
  } catch (const IoError& e) {
    fmt::print(err, "i/o error: {}\n", e.what());
    return exit_code::kIo;
  }
}

RunKind require_kind(std::string_view name) {
  auto k = parse_run_kind(name);
  if (!k) throw ConfigError({fmt::format("unknown run kind '{}' (expected gpe or pp)", name)});
  return *k;
}

std::string read_input(const std::string& path) {
  try {
    return read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError({e.what()});
  }
}

bool looks_like_json(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

struct LoadedInput {
  RunConfig config;
  std::optional<RunKind> manifest_kind;
};

LoadedInput load_input(const std::string& path, std::ostream& err) {
  const std::string text = read_input(path);
  LoadedInput in;
  std::string config_text = text;
  if (looks_like_json(text)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError({fmt::format("{}: invalid manifest JSON: {}", path, e.what())});
    }
    const RunManifest m = manifest_from_json(j);
    in.manifest_kind = require_kind(m.kind);
    config_text = m.config_text;
  }
  ParsedConfig parsed = parse_config(config_text);
  for (const auto& w : parsed.warnings) fmt::print(err, "warning: {}\n", w);
  in.config = std::move(parsed.config);
  return in;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_phase(item);
    if (!v) throw ConfigError({fmt::format("{}: cannot read '{}'", what, item)});
    out.push_back(*v);
  }
  return out;
}

std::vector<double> oracle_times(const OracleOptions& o) {
  if (o.t) {
    if (!std::isfinite(*o.t) || *o.t < 0.0) throw DomainError("--t must be finite and >= 0");
    return {*o.t};
  }
  if (!(o.dt > 0.0) || !(o.t_final >= 0.0) || !std::isfinite(o.t_final)) {
    throw DomainError("--dt must be > 0 and --t-final >= 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(o.t_final / o.dt));
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = static_cast<double>(i) * o.dt;
  return times;
}

struct OracleProblem {
  LatticeSpec lattice;
  InitialStateSpec init;
};

OracleProblem oracle_problem(const OracleOptions& o, bool fock_numbers, std::ostream& err) {
  OracleProblem p;
  if (o.config_path) {
    const RunConfig cfg = load_input(*o.config_path, err).config;
    p.lattice = cfg.lattice.build();
    p.init = cfg.init;
    return p;
  }
  std::vector<double> atoms;
  if (o.gate) {
    p.lattice = make_gate_lattice({0.0, 0.0, 0.0, 0.0}, o.J, o.chi);
    atoms = o.atoms ? parse_list(*o.atoms, "--atoms") : std::vector<double>{50.0, 0.0, 50.0, 0.0};
  } else if (o.modes) {
    p.lattice = make_chain_lattice(*o.modes, o.J, o.chi);
    if (!o.atoms) throw ConfigError({"--atoms is required with --modes"});
    atoms = parse_list(*o.atoms, "--atoms");
  } else {
    throw ConfigError({"one of --gate, --modes or --config is required"});
  }
  if (atoms.size() != p.lattice.n_modes) {
    throw ConfigError({fmt::format("--atoms has {} entries for {} modes", atoms.size(), p.lattice.n_modes)});
  }
  p.init.modes.resize(atoms.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!(atoms[j] >= 0.0)) throw ConfigError({"--atoms entries must be >= 0"});
    if (fock_numbers) {
      if (atoms[j] != std::floor(atoms[j])) throw ConfigError({"--atoms must be integers for the Fock oracle"});
      p.init.modes[j].state = Fock{static_cast<std::int64_t>(atoms[j])};
    } else if (atoms[j] > 0.0) {
      p.init.modes[j].state = Coherent{atoms[j], 0.0};
    }
  }
  if (o.gate) p.init.modes[2].phase_shift = o.theta;
  return p;
}

void print_occupation_header(std::ostream& out, std::size_t n) {
  fmt::print(out, "t");
  for (std::size_t j = 0; j < n; ++j) fmt::print(out, ",N{}", j + 1);
  fmt::print(out, "\n");
}

}  // namespace

std::optional<RunKind> parse_run_kind(std::string_view name) noexcept {
  if (name == "gpe") return RunKind::Gpe;
  if (name == "pp") return RunKind::Pp;
  return std::nullopt;
}

std::string_view run_kind_name(RunKind kind) noexcept { return kind == RunKind::Gpe ? "gpe" : "pp"; }

IntegratorConfig effective_integrator(const RunConfig& config, RunKind kind) {
  IntegratorConfig ic = config.integrator;
  if (kind == RunKind::Gpe) {
    ic.scheme = Scheme::Rk4;
  } else if (ic.scheme == Scheme::Rk4) {
    ic.scheme = Scheme::Rk4Maruyama;
  }
  return ic;
}

SimulationResult run_simulation(const RunConfig& config, RunKind kind, unsigned workers,
                                const std::function<void(std::uint64_t, std::uint64_t)>& progress) {
  const auto start = std::chrono::steady_clock::now();
  const LatticeSpec lattice = config.lattice.build();
  const IntegratorConfig ic = effective_integrator(config, kind);
  SimulationResult result;
  if (kind == RunKind::Gpe) {
    const TrajectoryRecord record = integrate_gpe(lattice, mean_field_point(config.init), ic);
    result.series = number_series(record);
  } else {
    EnsembleOptions opts;
    opts.accumulate_coherences = config.coherences;
    opts.workers = workers;
    opts.progress = progress;
    result.stats = run_ensemble(lattice, config.init, ic, config.n_traj, config.seed, opts);
    result.series = number_series(*result.stats, config.init.total_atoms());
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunKind kind = require_kind(o.kind);
    LoadedInput in = load_input(o.input_path, err);
    if (in.manifest_kind && *in.manifest_kind != kind) {
      throw ConfigError({fmt::format("manifest was written by a '{}' run", run_kind_name(*in.manifest_kind))});
    }
    RunConfig& cfg = in.config;
    if (o.n_traj) {
      if (*o.n_traj < 1) throw ConfigError({"--n-traj must be >= 1"});
      cfg.n_traj = *o.n_traj;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.series_path) cfg.series_path = *o.series_path;
    if (o.summary_path) cfg.summary_path = *o.summary_path;
    if (o.manifest_path) cfg.manifest_path = *o.manifest_path;

    std::function<void(std::uint64_t, std::uint64_t)> progress;
    if (o.progress) {
      progress = [&err, total = cfg.n_traj](std::uint64_t done, std::uint64_t diverged) {
        fmt::print(err, "\r{}/{} trajectories, {} diverged", done, total, diverged);
        err.flush();
      };
    }
    const SimulationResult result = run_simulation(cfg, kind, o.workers, progress);
    if (o.progress) fmt::print(err, "\n");

    RunManifest manifest;
    manifest.kind = std::string(run_kind_name(kind));
    manifest.config_text = serialize_config(cfg);
    manifest.version = std::string(software_version());
    manifest.wall_seconds = result.wall_seconds;
    manifest.n_traj = result.stats ? result.stats->n_traj() : 1;
    manifest.n_diverged = result.stats ? result.stats->n_diverged() : 0;
    manifest.reliable = result.reliable();

    SummaryInput summary{&result.series, result.stats ? &*result.stats : nullptr, cfg.target_mode, &manifest};
    write_series_csv(result.series, cfg.series_path);
    write_summary_json(summary, cfg.summary_path);
    write_text_file(cfg.resolved_manifest_path(), to_json(manifest).dump(2) + "\n");

    const Transfer tr = transfer_efficiency(result.series, cfg.target_mode);
    fmt::print(out, "well {}: peak {} at t = {}, transfer efficiency {}", cfg.target_mode + 1, tr.peak_value,
               tr.peak_time, tr.efficiency);
    if (result.stats) fmt::print(out, " +/- {}", tr.se);
    fmt::print(out, "\n");
    if (result.stats) {
      fmt::print(out, "{} trajectories, {} diverged\n", result.stats->n_traj(), result.stats->n_diverged());
    }
    if (!result.reliable()) {
      fmt::print(err, "unreliable run: diverged fraction {} exceeds {}\n",
                 static_cast<double>(manifest.n_diverged) / static_cast<double>(manifest.n_traj),
                 EnsembleStats::kMaxDivergedFraction);
      return exit_code::kUnreliable;
    }
    return exit_code::kOk;
  });
}

std::vector<SweepRow> sweep_phase(const RunConfig& base, RunKind kind, std::vector<double> phases,
                                  std::size_t phase_mode, unsigned workers) {
  if (phases.size() < 2) throw ConfigError({"phase grid needs at least two values"});
  if (phase_mode < 1 || phase_mode > base.init.modes.size()) {
    throw ConfigError({fmt::format("--mode must be in 1..{}", base.init.modes.size())});
  }
  std::sort(phases.begin(), phases.end());
  std::vector<SweepRow> rows;
  rows.reserve(phases.size());
  for (double theta : phases) {
    RunConfig cfg = base;
    cfg.init.modes[phase_mode - 1].phase_shift = theta;
    const SimulationResult result = run_simulation(cfg, kind, workers);
    rows.push_back({theta, transfer_efficiency(result.series, cfg.target_mode), result.reliable()});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,transfer_efficiency,peak_time,efficiency_se\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", format_double(r.theta), format_double(r.transfer.efficiency),
                       format_double(r.transfer.peak_time), format_double(r.transfer.se));
  }
  return out;
}

int cmd_sweep_phase(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunKind kind = require_kind(o.kind);
    auto phases = parse_phase_grid(o.phases);
    if (!phases) throw ConfigError({fmt::format("--phases: cannot read grid '{}'", o.phases)});
    RunConfig cfg = load_input(o.config_path, err).config;
    if (o.n_traj) cfg.n_traj = *o.n_traj;
    const auto rows = sweep_phase(cfg, kind, std::move(*phases), o.mode, o.workers);
    const std::string csv = sweep_csv(rows);
    if (o.out_path) {
      write_text_file(*o.out_path, csv);
    } else {
      out << csv;
    }
    const bool reliable = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.reliable; });
    if (!reliable) {
      fmt::print(err, "unreliable run: at least one phase exceeded the divergence budget\n");
      return exit_code::kUnreliable;
    }
    return exit_code::kOk;
  });
}

int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<double> times = oracle_times(o);
    if (o.kind == "linear") {
      const OracleProblem p = oracle_problem(o, false, err);
      if (!p.init.deterministic()) {
        throw DomainError("the linear oracle needs coherent or vacuum modes; use 'oracle fock' for number states");
      }
      const LinearOracle oracle(p.lattice);
      const PhasePoint start = mean_field_point(p.init);
      print_occupation_header(out, p.lattice.n_modes);
      for (double t : times) {
        const auto alpha = oracle.evolve(start.alpha, t);
        fmt::print(out, "{}", format_double(t));
        for (const auto& a : alpha) fmt::print(out, ",{}", format_double(std::norm(a)));
        fmt::print(out, "\n");
      }
      return exit_code::kOk;
    }
    if (o.kind == "fock") {
      const OracleProblem p = oracle_problem(o, true, err);
      const FockOracle oracle(p.lattice, p.init, o.n_max);
      print_occupation_header(out, p.lattice.n_modes);
      for (double t : times) {
        const auto n = exact_quantum_numbers(oracle, t);
        fmt::print(out, "{}", format_double(t));
        for (double v : n) fmt::print(out, ",{}", format_double(v));
        fmt::print(out, "\n");
      }
      return exit_code::kOk;
    }
    throw ConfigError({fmt::format("unknown oracle '{}' (expected linear or fock)", o.kind)});
  });
}

}  // namespace atomgate
