#include "atomgate/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <variant>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Resolver {
 public:
  explicit Resolver(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  template <class Parse>
  auto take_as(const std::string& key, Parse parse, const char* what) -> decltype(parse(std::string_view{})) {
    auto raw = take(key);
    if (!raw) return std::nullopt;
    auto v = parse(*raw);
    if (!v) errors.push_back(fmt::format("{}: expected {}, got '{}'", key, what, *raw));
    return v;
  }

  std::optional<double> real(const std::string& key) { return take_as(key, parse_real, "a finite number"); }

  void report_unused() {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) errors.push_back(fmt::format("line {}: unknown key '{}'", entry.line, key));
    }
  }

  std::vector<std::string> keys_with_prefix(std::string_view prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries_) {
      if (std::string_view(key).substr(0, prefix.size()) == prefix) out.push_back(key);
    }
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

std::optional<std::vector<double>> parse_real_list(std::string_view s) {
  std::vector<double> out;
  for (auto part : split(s, ',')) {
    auto v = parse_real(part);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

void resolve_lattice(Resolver& r, RunConfig& cfg) {
  auto& lat = cfg.lattice;
  const auto preset = r.take("lattice.preset");
  if (!preset) {
    r.errors.emplace_back(r.keys_with_prefix("lattice.").empty() ? "missing lattice"
                                                                  : "lattice.preset: missing");
    return;
  }
  if (*preset == "gate") {
    lat.kind = LatticeConfig::Kind::Gate;
    lat.modes = 4;
    if (auto m = r.take_as("lattice.modes", parse_int<std::size_t>, "an integer"); m && *m != 4) {
      r.errors.emplace_back("lattice.modes: the gate preset has 4 modes");
    }
    if (auto j = r.real("lattice.J")) lat.J = *j;
    if (!r.keys_with_prefix("lattice.coupling.").empty()) {
      r.errors.emplace_back("lattice.coupling: not allowed with the gate preset (use lattice.J)");
      for (const auto& k : r.keys_with_prefix("lattice.coupling.")) r.take(k);
    }
  } else if (*preset == "custom") {
    lat.kind = LatticeConfig::Kind::Custom;
    lat.J = 1.0;
    auto m = r.take_as("lattice.modes", parse_int<std::size_t>, "an integer");
    if (!m) {
      if (!r.has("lattice.modes")) r.errors.emplace_back("lattice.modes: required for the custom preset");
      return;
    }
    if (*m < 1 || *m > 64) {
      r.errors.emplace_back("lattice.modes: must be between 1 and 64");
      return;
    }
    lat.modes = *m;
    if (r.has("lattice.J")) r.errors.emplace_back("lattice.J: only valid with the gate preset");
    r.take("lattice.J");
    std::map<std::pair<std::size_t, std::size_t>, double> edges;
    for (const auto& key : r.keys_with_prefix("lattice.coupling.")) {
      const auto parts = split(std::string_view(key).substr(std::string_view("lattice.coupling.").size()), '.');
      auto value = r.real(key);
      std::optional<std::size_t> a, b;
      if (parts.size() == 2) {
        a = parse_int<std::size_t>(parts[0]);
        b = parse_int<std::size_t>(parts[1]);
      }
      if (!a || !b || *a < 1 || *b < 1 || *a > lat.modes || *b > lat.modes || *a == *b) {
        r.errors.push_back(fmt::format("{}: expected lattice.coupling.<j>.<k> with distinct wells in 1..{}",
                                       key, lat.modes));
        continue;
      }
      if (!value) continue;
      const std::pair<std::size_t, std::size_t> edge{std::min(*a, *b) - 1, std::max(*a, *b) - 1};
      if (auto it = edges.find(edge); it != edges.end() && it->second != *value) {
        r.errors.push_back(fmt::format("{}: conflicts with the value given for ({},{})", key, *b, *a));
        continue;
      }
      edges[edge] = *value;
    }
    lat.edges.clear();
    for (const auto& [e, v] : edges) lat.edges.push_back({e.first, e.second, v});
  } else {
    r.errors.push_back(fmt::format("lattice.preset: unknown preset '{}' (expected gate or custom)", *preset));
    return;
  }
  if (auto chi = r.real("lattice.chi")) lat.chi = *chi;
  if (auto e = r.take_as("lattice.energies", parse_real_list, "a comma-separated list of numbers")) {
    if (e->size() != lat.modes) {
      r.errors.push_back(fmt::format("lattice.energies: {} values for {} modes", e->size(), lat.modes));
    } else {
      lat.energies = std::all_of(e->begin(), e->end(), [](double x) { return x == 0.0; }) ? std::vector<double>{}
                                                                                          : *e;
    }
  }
}

void resolve_init(Resolver& r, RunConfig& cfg) {
  const std::size_t n = cfg.lattice.modes;
  cfg.init.modes.assign(n, ModeInit{});
  std::set<std::size_t> seen;
  for (const auto& key : r.keys_with_prefix("init.")) {
    const auto parts = split(std::string_view(key), '.');
    auto j = parts.size() == 3 ? parse_int<std::size_t>(parts[1]) : std::nullopt;
    if (!j || *j < 1 || *j > n) {
      r.errors.push_back(fmt::format("{}: expected init.<well>.<field> with well in 1..{}", key, n));
      r.take(key);
      continue;
    }
    seen.insert(*j);
  }
  for (std::size_t j : seen) {
    const std::string base = fmt::format("init.{}.", j);
    auto& mode = cfg.init.modes[j - 1];
    const auto kind = r.take(base + "kind");
    const auto mean = r.real(base + "mean");
    const auto number = r.take_as(base + "number", parse_int<std::int64_t>, "an integer");
    const auto coherent_phase = r.take_as(base + "coherent_phase", parse_phase, "a phase");
    const auto phase = r.take_as(base + "phase", parse_phase, "a phase");
    if (!kind) {
      r.errors.push_back(fmt::format("{}kind: missing", base));
      continue;
    }
    if (*kind == "vacuum") {
      mode.state = Vacuum{};
      if (mean || number || coherent_phase) r.errors.push_back(fmt::format("{}kind: vacuum takes no parameters", base));
      if (phase) r.warnings.push_back(fmt::format("{}phase: has no effect on a vacuum mode", base));
    } else if (*kind == "coherent") {
      if (!mean) {
        if (!r.has(base + "mean")) r.errors.push_back(fmt::format("{}mean: required for a coherent state", base));
        continue;
      }
      if (*mean < 0.0) r.errors.push_back(fmt::format("{}mean: must be >= 0", base));
      if (number) r.errors.push_back(fmt::format("{}number: not valid for a coherent state", base));
      mode.state = Coherent{*mean, coherent_phase.value_or(0.0)};
    } else if (*kind == "fock") {
      if (!number) {
        if (!r.has(base + "number")) r.errors.push_back(fmt::format("{}number: required for a Fock state", base));
        continue;
      }
      if (*number < 0) r.errors.push_back(fmt::format("{}number: must be >= 0", base));
      if (mean || coherent_phase) r.errors.push_back(fmt::format("{}: mean/coherent_phase not valid for a Fock state", base));
      mode.state = Fock{*number};
    } else {
      r.errors.push_back(fmt::format("{}kind: unknown state kind '{}' (expected vacuum, coherent or fock)", base, *kind));
      continue;
    }
    mode.phase_shift = phase.value_or(0.0);
  }
}

void resolve_rest(Resolver& r, RunConfig& cfg) {
  auto& ic = cfg.integrator;
  if (auto v = r.real("integrator.dt")) ic.dt = *v;
  if (auto v = r.real("integrator.t_final")) ic.t_final = *v;
  if (auto v = r.take_as("integrator.record_stride", parse_int<int>, "an integer")) ic.record_stride = *v;
  if (auto v = r.take_as("integrator.noise_refine", parse_int<int>, "an integer")) ic.noise_refine = *v;
  if (auto v = r.take_as("integrator.scheme", parse_scheme, "rk4, euler-maruyama or rk4-maruyama")) ic.scheme = *v;
  if (auto v = r.real("ensemble.divergence_threshold")) ic.divergence_threshold = *v;
  if (auto v = r.take_as("ensemble.n_traj", parse_int<std::uint64_t>, "an unsigned integer")) {
    if (*v < 1) r.errors.emplace_back("ensemble.n_traj: must be >= 1");
    cfg.n_traj = *v;
  }
  if (auto v = r.take_as("ensemble.seed", parse_int<std::uint64_t>, "a 64-bit unsigned integer")) cfg.seed = *v;
  if (auto v = r.take("output.series")) cfg.series_path = *v;
  if (auto v = r.take("output.summary")) cfg.summary_path = *v;
  if (auto v = r.take("output.manifest")) cfg.manifest_path = *v;
  cfg.target_mode = std::min<std::size_t>(cfg.lattice.modes, 4) - 1;
  if (auto v = r.take_as("output.target_mode", parse_int<std::size_t>, "a well index")) {
    if (*v < 1 || *v > cfg.lattice.modes) {
      r.errors.push_back(fmt::format("output.target_mode: must be in 1..{}", cfg.lattice.modes));
    } else {
      cfg.target_mode = *v - 1;
    }
  }
  if (auto v = r.take_as("flags.coherences", parse_bool, "true or false")) cfg.coherences = *v;

  try {
    ic.validate();
  } catch (const DomainError& e) {
    r.errors.push_back(fmt::format("integrator: {}", e.what()));
  }
}

}  // namespace

LatticeSpec LatticeConfig::build() const {
  if (kind == Kind::Gate) {
    std::array<double, 4> e{};
    if (!energies.empty()) std::copy_n(energies.begin(), 4, e.begin());
    return make_gate_lattice(e, J, chi);
  }
  LatticeSpec spec;
  spec.n_modes = modes;
  spec.energies = energies.empty() ? std::vector<double>(modes, 0.0) : energies;
  spec.chi = chi;
  spec.coupling.assign(modes * modes, 0.0);
  for (const auto& e : edges) {
    spec.J(e.j, e.k) = e.value;
    spec.J(e.k, e.j) = e.value;
  }
  require_valid(spec);
  return spec;
}

std::string RunConfig::resolved_manifest_path() const {
  if (!manifest_path.empty()) return manifest_path;
  std::string base = summary_path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") base.resize(base.size() - 5);
  return base + ".manifest.json";
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

std::optional<double> parse_phase(std::string_view text) {
  std::string_view s = trim(text);
  if (auto v = parse_real(s)) return v;
  const auto pos = s.find("pi");
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view coef = trim(s.substr(0, pos));
  std::string_view rest = trim(s.substr(pos + 2));
  double c = 1.0;
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  if (coef == "-") {
    c = -1.0;
  } else if (coef == "+" || coef.empty()) {
    c = 1.0;
  } else if (auto v = parse_real(coef)) {
    c = *v;
  } else {
    return std::nullopt;
  }
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return std::nullopt;
    auto v = parse_real(rest.substr(1));
    if (!v || *v == 0.0) return std::nullopt;
    d = *v;
  }
  return c * std::numbers::pi / d;
}

std::optional<std::vector<double>> parse_phase_grid(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) return std::nullopt;
    const auto a = parse_phase(parts[0]);
    const auto b = parse_phase(parts[1]);
    const auto n = parse_int<std::size_t>(parts[2]);
    if (!a || !b || !n || *n < 1) return std::nullopt;
    for (std::size_t i = 0; i < *n; ++i) {
      out.push_back(*n == 1 ? *a : *a + (*b - *a) * static_cast<double>(i) / static_cast<double>(*n - 1));
    }
    return out;
  }
  for (auto part : split(text, ',')) {
    auto v = parse_phase(part);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

ParsedConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> syntax;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      syntax.push_back(fmt::format("line {}: expected 'key = value'", line_no));
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      syntax.push_back(fmt::format("line {}: expected 'key = value'", line_no));
      continue;
    }
    if (entries.count(key)) {
      syntax.push_back(fmt::format("line {}: duplicate key '{}' (first on line {})", line_no, key, entries[key].line));
      continue;
    }
    entries.emplace(key, Entry{value, line_no});
  }
  if (!syntax.empty()) throw ConfigError(std::move(syntax));

  Resolver r(std::move(entries));
  ParsedConfig out;
  resolve_lattice(r, out.config);
  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  resolve_init(r, out.config);
  resolve_rest(r, out.config);
  r.report_unused();
  if (r.errors.empty()) {
    try {
      (void)out.config.lattice.build();
    } catch (const ValidationError& e) {
      for (const auto& v : e.violations()) r.errors.push_back("lattice: " + v);
    }
  }
  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  out.warnings = std::move(r.warnings);
  return out;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  const auto& lat = c.lattice;
  put("lattice.preset", lat.kind == LatticeConfig::Kind::Gate ? "gate" : "custom");
  if (lat.kind == LatticeConfig::Kind::Custom) put("lattice.modes", std::to_string(lat.modes));
  if (lat.kind == LatticeConfig::Kind::Gate) put("lattice.J", format_double(lat.J));
  put("lattice.chi", format_double(lat.chi));
  if (!lat.energies.empty()) {
    std::string list;
    for (std::size_t i = 0; i < lat.energies.size(); ++i) list += (i ? "," : "") + format_double(lat.energies[i]);
    put("lattice.energies", list);
  }
  for (const auto& e : lat.edges) put(fmt::format("lattice.coupling.{}.{}", e.j + 1, e.k + 1), format_double(e.value));

  for (std::size_t j = 0; j < c.init.modes.size(); ++j) {
    const auto& m = c.init.modes[j];
    const std::string base = fmt::format("init.{}.", j + 1);
    if (const auto* co = std::get_if<Coherent>(&m.state)) {
      put(base + "kind", "coherent");
      put(base + "mean", format_double(co->mean_number));
      if (co->phase != 0.0) put(base + "coherent_phase", format_double(co->phase));
    } else if (const auto* f = std::get_if<Fock>(&m.state)) {
      put(base + "kind", "fock");
      put(base + "number", std::to_string(f->number));
    } else if (m.phase_shift != 0.0) {
      put(base + "kind", "vacuum");
    } else {
      continue;
    }
    if (m.phase_shift != 0.0) put(base + "phase", format_double(m.phase_shift));
  }

  const auto& ic = c.integrator;
  put("integrator.scheme", std::string(scheme_name(ic.scheme)));
  put("integrator.dt", format_double(ic.dt));
  put("integrator.t_final", format_double(ic.t_final));
  put("integrator.record_stride", std::to_string(ic.record_stride));
  put("integrator.noise_refine", std::to_string(ic.noise_refine));
  put("ensemble.n_traj", std::to_string(c.n_traj));
  put("ensemble.seed", std::to_string(c.seed));
  if (ic.divergence_threshold) put("ensemble.divergence_threshold", format_double(*ic.divergence_threshold));
  put("output.series", c.series_path);
  put("output.summary", c.summary_path);
  if (!c.manifest_path.empty()) put("output.manifest", c.manifest_path);
  put("output.target_mode", std::to_string(c.target_mode + 1));
  put("flags.coherences", c.coherences ? "true" : "false");
  return out;
}

}  // namespace atomgate
