#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atomgate/initial_states.hpp"
#include "atomgate/integrators.hpp"
#include "atomgate/lattice.hpp"

namespace atomgate {

struct LatticeConfig {
  enum class Kind { Gate, Custom };
  struct Edge {
    std::size_t j = 0;  // 0-based, j < k
    std::size_t k = 0;
    double value = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  Kind kind = Kind::Gate;
  std::size_t modes = 4;
  std::vector<double> energies;  // empty means all zero
  double J = 1.0;                // gate preset only
  double chi = 0.0;
  std::vector<Edge> edges;  // custom only, sorted by (j, k)

  LatticeSpec build() const;
  friend bool operator==(const LatticeConfig&, const LatticeConfig&) = default;
};

/// Everything needed to reproduce a run.
struct RunConfig {
  LatticeConfig lattice;
  InitialStateSpec init;
  IntegratorConfig integrator;
  std::uint64_t n_traj = 1000;
  std::uint64_t seed = 1;
  std::string series_path = "series.csv";
  std::string summary_path = "summary.json";
  std::string manifest_path;  // empty: derived from the summary path
  std::size_t target_mode = 3;  // 0-based; well 4 of the gate
  bool coherences = false;

  std::string resolved_manifest_path() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// Strict parser for the dotted key = value format. Collects every problem
/// and throws ConfigError; syntax errors carry line numbers, semantic errors
/// the offending key.
ParsedConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(serialize_config(c)).config == c.
std::string serialize_config(const RunConfig& config);

/// Reads a phase: a plain number or a multiple of pi such as `pi`, `-pi/2`,
/// `3pi/4`, `0.25*pi`.
std::optional<double> parse_phase(std::string_view text);

/// Parses a phase grid: comma list (`0,pi/2,pi`) or `start:stop:count`.
std::optional<std::vector<double>> parse_phase_grid(std::string_view text);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

}  // namespace atomgate
