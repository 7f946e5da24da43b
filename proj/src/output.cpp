#include "atomgate/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "atomgate/config.hpp"
#include "atomgate/error.hpp"

#ifndef ATOMGATE_VERSION
#define ATOMGATE_VERSION "0.0.0"
#endif

namespace atomgate {

std::string_view software_version() noexcept { return ATOMGATE_VERSION; }

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["kind"] = m.kind;
  j["version"] = m.version;
  j["config"] = m.config_text;
  j["wall_seconds"] = m.wall_seconds;
  j["n_traj"] = m.n_traj;
  j["n_diverged"] = m.n_diverged;
  j["reliable"] = m.reliable;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  RunManifest m;
  auto get_string = [&](const char* key, std::string& out) {
    if (!j.contains(key) || !j[key].is_string()) {
      errors.push_back(fmt::format("manifest.{}: missing or not a string", key));
      return;
    }
    out = j[key].get<std::string>();
  };
  if (!j.is_object()) throw ConfigError({"manifest: expected a JSON object"});
  get_string("kind", m.kind);
  get_string("config", m.config_text);
  if (j.contains("version") && j["version"].is_string()) m.version = j["version"].get<std::string>();
  if (j.contains("wall_seconds") && j["wall_seconds"].is_number()) m.wall_seconds = j["wall_seconds"].get<double>();
  if (j.contains("n_traj") && j["n_traj"].is_number_unsigned()) m.n_traj = j["n_traj"].get<std::uint64_t>();
  if (j.contains("n_diverged") && j["n_diverged"].is_number_unsigned()) {
    m.n_diverged = j["n_diverged"].get<std::uint64_t>();
  }
  if (j.contains("reliable") && j["reliable"].is_boolean()) m.reliable = j["reliable"].get<bool>();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return m;
}

std::string series_csv(const NumberSeries& s) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "t");
  for (std::size_t j = 0; j < s.n_modes(); ++j) fmt::format_to(out, ",N{0}_mean,N{0}_var,N{0}_se", j + 1);
  fmt::format_to(out, "\n");
  for (std::size_t t = 0; t < s.times.size(); ++t) {
    fmt::format_to(out, "{}", format_double(s.times[t]));
    for (std::size_t j = 0; j < s.n_modes(); ++j) {
      fmt::format_to(out, ",{},{},{}", format_double(s.mean[j][t]), format_double(s.variance[j][t]),
                     format_double(s.se[j][t]));
    }
    fmt::format_to(out, "\n");
  }
  return fmt::to_string(buf);
}

nlohmann::ordered_json summary_json(const SummaryInput& in) {
  const NumberSeries& s = *in.series;
  nlohmann::ordered_json j;
  j["kind"] = in.stats ? "pp" : "gpe";
  j["n_modes"] = s.n_modes();
  j["total_atoms"] = s.total_atoms;
  j["target_mode"] = in.target_mode + 1;

  const Transfer target = transfer_efficiency(s, in.target_mode);
  j["transfer_efficiency"] = target.efficiency;
  j["efficiency_se"] = target.se;
  j["peak_time"] = target.peak_time;

  auto modes = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < s.n_modes(); ++m) {
    const Transfer tr = transfer_efficiency(s, m);
    nlohmann::ordered_json mj;
    mj["mode"] = m + 1;
    mj["peak_value"] = tr.peak_value;
    mj["peak_time"] = tr.peak_time;
    mj["peak_se"] = s.se[m][tr.peak_index];
    mj["peak_fraction"] = tr.efficiency;
    modes.push_back(std::move(mj));
  }
  j["modes"] = std::move(modes);

  nlohmann::ordered_json ens;
  ens["n_traj"] = in.stats ? in.stats->n_traj() : 1;
  ens["n_diverged"] = in.stats ? in.stats->n_diverged() : 0;
  ens["reliable"] = in.stats ? in.stats->reliable() : true;
  if (in.stats) {
    const ImaginaryHealth h = imaginary_health(*in.stats);
    ens["imaginary_checked"] = h.checked;
    ens["imaginary_violations"] = h.violations;
    ens["imaginary_worst_z"] = h.worst_z;
    ens["imaginary_healthy"] = h.healthy();
  }
  j["ensemble"] = std::move(ens);

  nlohmann::ordered_json series;
  series["t"] = s.times;
  for (std::size_t m = 0; m < s.n_modes(); ++m) {
    nlohmann::ordered_json mj;
    mj["mean"] = s.mean[m];
    mj["variance"] = s.variance[m];
    mj["se"] = s.se[m];
    series[fmt::format("N{}", m + 1)] = std::move(mj);
  }
  j["series"] = std::move(series);
  if (in.manifest) j["manifest"] = to_json(*in.manifest);
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path));
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw IoError(fmt::format("write to '{}' failed", path));
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot replace '{}'", path));
  }
}

void write_series_csv(const NumberSeries& series, const std::string& path) {
  write_text_file(path, series_csv(series));
}

void write_summary_json(const SummaryInput& in, const std::string& path) {
  write_text_file(path, summary_json(in).dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace atomgate
