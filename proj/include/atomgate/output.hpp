#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "atomgate/ensemble.hpp"
#include "atomgate/observables.hpp"

namespace atomgate {

/// Version string recorded in manifests.
std::string_view software_version() noexcept;

/// Everything needed to rerun a simulation. `config_text` is the resolved,
/// serialized configuration including command-line overrides.
struct RunManifest {
  std::string kind;  // "gpe" or "pp"
  std::string config_text;
  std::string version;
  double wall_seconds = 0.0;
  std::uint64_t n_traj = 0;
  std::uint64_t n_diverged = 0;
  bool reliable = true;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);
/// Throws ConfigError when required members are missing.
RunManifest manifest_from_json(const nlohmann::json& j);

/// Header `t,N1_mean,N1_var,N1_se,N2_mean,...`, 17 significant digits.
std::string series_csv(const NumberSeries& series);

struct SummaryInput {
  const NumberSeries* series = nullptr;
  const EnsembleStats* stats = nullptr;  // null for mean-field runs
  std::size_t target_mode = 3;
  const RunManifest* manifest = nullptr;
};
nlohmann::ordered_json summary_json(const SummaryInput& in);

/// Writes through a temporary file in the same directory. Throws IoError.
void write_text_file(const std::string& path, const std::string& content);
void write_series_csv(const NumberSeries& series, const std::string& path);
void write_summary_json(const SummaryInput& in, const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace atomgate
