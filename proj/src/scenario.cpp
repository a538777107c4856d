#include "dmasense/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace dmasense {

std::vector<double> Waveform::subcarrier_grid() const {
  std::vector<double> grid(subcarriers);
  for (int k = 0; k < subcarriers; ++k) grid[k] = subcarrier_hz(k);
  return grid;
}

namespace {

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

void Scenario::validate() const {
  const Waveform& w = waveform;
  if (!(w.carrier_hz > 0)) throw ValidationError("carrier frequency must be positive");
  if (!(w.spacing_hz > 0)) throw ValidationError("subcarrier spacing must be positive");
  if (w.subcarriers < 1) throw ValidationError("subcarrier count must be >= 1");
  if (!(w.tx_power_w > 0)) throw ValidationError("transmit power must be positive");
  if (!(w.noise_power_w > 0)) throw ValidationError("noise power must be positive");
  if (w.pilot_symbols < 1) throw ValidationError("pilot symbol count must be >= 1");
  if (!(w.subcarrier_hz(0) > 0))
    throw ValidationError("subcarrier grid extends to non-positive frequencies");

  const DmaHardware& h = hardware;
  if (h.rf_chains < 1) throw ValidationError("rf chain count must be >= 1");
  if (h.elements_per_strip < 1) throw ValidationError("elements per strip must be >= 1");
  if (!(h.element_spacing_m > 0)) throw ValidationError("element spacing must be positive");
  if (!(h.damping_rad_hz > 0)) throw ValidationError("damping factor must be positive");
  if (!(h.f_r_min_hz < h.f_r_max_hz)) throw ValidationError("tuning limits inverted");
  if (!(h.f_r_min_hz > 0)) throw ValidationError("tuning limits must be positive");
  if (!(h.leakage_fraction >= 0 && h.leakage_fraction < 1))
    throw ValidationError("leakage fraction out of range [0,1)");
  if (!(h.eps_eff > 0)) throw ValidationError("effective permittivity must be positive");
  if (!h.element_coupling.empty() &&
      static_cast<int>(h.element_coupling.size()) != h.elements())
    throw ValidationError("element coupling table size does not match element count");

  const SceneGeometry& g = geometry;
  if (!(dist(g.ue, g.rx) > 0)) throw ValidationError("UE collocated with receiver");
  for (std::size_t s = 0; s < g.sps.size(); ++s) {
    if (!(dist(g.sps[s], g.rx) > 0))
      throw ValidationError("scatterer collocated with receiver");
    if (!(dist(g.sps[s], g.ue) > 0))
      throw ValidationError("scatterer collocated with UE");
    for (std::size_t t = s + 1; t < g.sps.size(); ++t) {
      if (!(dist(g.sps[s], g.sps[t]) > 0))
        throw ValidationError("scatterers collocated");
    }
  }
  if (!g.reflections.empty() && g.reflections.size() != g.sps.size())
    throw ValidationError("reflection coefficient count does not match scatterer count");

  if (configurations < 1) throw ValidationError("configuration count must be >= 1");
}

Scenario default_scenario() {
  Scenario s;  // field initializers carry the default values
  s.geometry.sps = {{5.0, 3.0}, {4.0, 4.0}};
  s.geometry.reflections = {cplx{1.0, 0.0}, cplx{1.0, 0.0}};
  return s;
}

// ---------------------------------------------------------------------------
// Config format (see docs/configuration.md). Line-based, '#' comments,
// [section] headers, "key = value" entries. Frequencies accept Hz/kHz/MHz/GHz
// suffixes, powers accept W/mW/dBm. 'sp' and 'reflection' are repeatable.
// ---------------------------------------------------------------------------

namespace {

struct RawConfig {
  // section.key -> list of values (repeatable keys keep order)
  std::map<std::string, std::vector<std::string>> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
  const std::string& last(const std::string& key) const {
    return entries.at(key).back();
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

RawConfig read_raw(std::istream& in) {
  RawConfig raw;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    raw.entries[section + "." + key].push_back(value);
  }
  return raw;
}

double parse_number(const std::string& text, const std::string& key) {
  const char* p = text.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p) throw ConfigError("'" + key + "': not a number: '" + text + "'");
  std::string unit = lower(trim(end));
  if (unit.empty()) return v;
  if (unit == "hz") return v;
  if (unit == "khz") return v * 1e3;
  if (unit == "mhz") return v * 1e6;
  if (unit == "ghz") return v * 1e9;
  if (unit == "w") return v;
  if (unit == "mw") return v * 1e-3;
  if (unit == "dbm") return dbm_to_watts(v);
  if (unit == "m") return v;
  if (unit == "mm") return v * 1e-3;
  throw ConfigError("'" + key + "': unknown unit '" + unit + "'");
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& key) {
  std::istringstream ss(text);
  double a, b;
  if (!(ss >> a >> b))
    throw ConfigError("'" + key + "': expected two numbers, got '" + text + "'");
  std::string rest;
  if (ss >> rest) throw ConfigError("'" + key + "': trailing content in '" + text + "'");
  return {a, b};
}

int parse_int(const std::string& text, const std::string& key) {
  double v = parse_number(text, key);
  double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
  return static_cast<int>(r);
}

void fetch(const RawConfig& raw, const std::string& key, double* out) {
  if (raw.has(key)) *out = parse_number(raw.last(key), key);
}

void fetch_int(const RawConfig& raw, const std::string& key, int* out) {
  if (raw.has(key)) *out = parse_int(raw.last(key), key);
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  RawConfig raw = read_raw(in);
  Scenario s = default_scenario();

  // waveform: subcarrier count first so bandwidth -> spacing can derive
  fetch_int(raw, "waveform.subcarriers", &s.waveform.subcarriers);
  fetch(raw, "waveform.carrier_hz", &s.waveform.carrier_hz);
  const bool has_bw = raw.has("waveform.bandwidth_hz");
  const bool has_sp = raw.has("waveform.subcarrier_spacing_hz");
  if (has_bw && has_sp)
    throw ConfigError("specify either bandwidth_hz or subcarrier_spacing_hz, not both");
  if (has_sp) {
    s.waveform.spacing_hz =
        parse_number(raw.last("waveform.subcarrier_spacing_hz"), "subcarrier_spacing_hz");
  } else if (has_bw) {
    if (s.waveform.subcarriers < 1)
      throw ValidationError("subcarrier count must be >= 1");
    s.waveform.spacing_hz =
        parse_number(raw.last("waveform.bandwidth_hz"), "bandwidth_hz") /
        s.waveform.subcarriers;
  }
  fetch(raw, "waveform.tx_power", &s.waveform.tx_power_w);
  fetch(raw, "waveform.noise_power", &s.waveform.noise_power_w);
  fetch_int(raw, "waveform.pilot_symbols", &s.waveform.pilot_symbols);

  // hardware: defaults derived from the (possibly overridden) carrier
  fetch_int(raw, "hardware.rf_chains", &s.hardware.rf_chains);
  fetch_int(raw, "hardware.elements_per_strip", &s.hardware.elements_per_strip);
  const double fc = s.waveform.carrier_hz;
  if (raw.has("hardware.damping_rad_hz") && raw.has("hardware.q_factor"))
    throw ConfigError("specify either damping_rad_hz or q_factor, not both");
  if (raw.has("hardware.q_factor")) {
    s.hardware.damping_rad_hz = kTwoPi * fc / parse_number(raw.last("hardware.q_factor"), "q_factor");
  } else if (raw.has("hardware.damping_rad_hz")) {
    s.hardware.damping_rad_hz = parse_number(raw.last("hardware.damping_rad_hz"), "damping_rad_hz");
  } else {
    s.hardware.damping_rad_hz = kTwoPi * fc / 100.0;
  }
  if (raw.has("hardware.element_spacing_m")) {
    s.hardware.element_spacing_m =
        parse_number(raw.last("hardware.element_spacing_m"), "element_spacing_m");
  } else {
    s.hardware.element_spacing_m = 0.5 * kSpeedOfLight / fc;
  }
  if (raw.has("hardware.f_r_min_hz")) {
    s.hardware.f_r_min_hz = parse_number(raw.last("hardware.f_r_min_hz"), "f_r_min_hz");
  } else {
    s.hardware.f_r_min_hz = fc - 250e6;
  }
  if (raw.has("hardware.f_r_max_hz")) {
    s.hardware.f_r_max_hz = parse_number(raw.last("hardware.f_r_max_hz"), "f_r_max_hz");
  } else {
    s.hardware.f_r_max_hz = fc + 250e6;
  }
  fetch(raw, "hardware.coupling", &s.hardware.coupling);
  fetch(raw, "hardware.leakage_fraction", &s.hardware.leakage_fraction);
  fetch(raw, "hardware.eps_eff", &s.hardware.eps_eff);

  // geometry
  if (raw.has("geometry.rx")) s.geometry.rx = parse_pair(raw.last("geometry.rx"), "rx");
  if (raw.has("geometry.ue")) s.geometry.ue = parse_pair(raw.last("geometry.ue"), "ue");
  if (raw.has("geometry.sp")) {
    s.geometry.sps.clear();
    for (const std::string& v : raw.entries.at("geometry.sp"))
      s.geometry.sps.push_back(parse_pair(v, "sp"));
    s.geometry.reflections.assign(s.geometry.sps.size(), cplx{1.0, 0.0});
  }
  if (raw.has("geometry.reflection")) {
    s.geometry.reflections.clear();
    for (const std::string& v : raw.entries.at("geometry.reflection")) {
      auto p = parse_pair(v, "reflection");
      s.geometry.reflections.push_back(cplx{p[0], p[1]});
    }
  }

  fetch_int(raw, "scenario.configurations", &s.configurations);

  // reject unknown keys so typos do not silently fall back to defaults
  static const char* known[] = {
      "waveform.subcarriers", "waveform.carrier_hz", "waveform.bandwidth_hz",
      "waveform.subcarrier_spacing_hz", "waveform.tx_power", "waveform.noise_power",
      "waveform.pilot_symbols", "hardware.rf_chains", "hardware.elements_per_strip",
      "hardware.damping_rad_hz", "hardware.q_factor", "hardware.element_spacing_m",
      "hardware.f_r_min_hz", "hardware.f_r_max_hz", "hardware.coupling",
      "hardware.leakage_fraction", "hardware.eps_eff", "geometry.rx", "geometry.ue",
      "geometry.sp", "geometry.reflection", "scenario.configurations"};
  for (const auto& [key, values] : raw.entries) {
    (void)values;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_scenario(in);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_scenario(const Scenario& s, std::ostream& out) {
  out << "[waveform]\n";
  out << "carrier_hz = " << fmt(s.waveform.carrier_hz) << "\n";
  out << "subcarrier_spacing_hz = " << fmt(s.waveform.spacing_hz) << "\n";
  out << "subcarriers = " << s.waveform.subcarriers << "\n";
  out << "tx_power = " << fmt(s.waveform.tx_power_w) << "\n";
  out << "noise_power = " << fmt(s.waveform.noise_power_w) << "\n";
  out << "pilot_symbols = " << s.waveform.pilot_symbols << "\n";
  out << "\n[hardware]\n";
  out << "rf_chains = " << s.hardware.rf_chains << "\n";
  out << "elements_per_strip = " << s.hardware.elements_per_strip << "\n";
  out << "element_spacing_m = " << fmt(s.hardware.element_spacing_m) << "\n";
  out << "damping_rad_hz = " << fmt(s.hardware.damping_rad_hz) << "\n";
  out << "coupling = " << fmt(s.hardware.coupling) << "\n";
  out << "f_r_min_hz = " << fmt(s.hardware.f_r_min_hz) << "\n";
  out << "f_r_max_hz = " << fmt(s.hardware.f_r_max_hz) << "\n";
  out << "leakage_fraction = " << fmt(s.hardware.leakage_fraction) << "\n";
  out << "eps_eff = " << fmt(s.hardware.eps_eff) << "\n";
  out << "\n[geometry]\n";
  out << "rx = " << fmt(s.geometry.rx[0]) << " " << fmt(s.geometry.rx[1]) << "\n";
  out << "ue = " << fmt(s.geometry.ue[0]) << " " << fmt(s.geometry.ue[1]) << "\n";
  for (const auto& q : s.geometry.sps)
    out << "sp = " << fmt(q[0]) << " " << fmt(q[1]) << "\n";
  for (const cplx& r : s.geometry.reflections)
    out << "reflection = " << fmt(r.real()) << " " << fmt(r.imag()) << "\n";
  out << "\n[scenario]\n";
  out << "configurations = " << s.configurations << "\n";
}

std::string save_scenario_string(const Scenario& s) {
  std::ostringstream ss;
  save_scenario(s, ss);
  return ss.str();
}

std::uint64_t Scenario::hash() const {
  const std::string text = save_scenario_string(*this);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace dmasense
