#include "dmasense/dma_frontend.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dmasense/kernels.hpp"

namespace dmasense {

cplx polarizability(double f_hz, double f_r_hz, double damping_rad_hz,
                    double coupling) {
  const cplx denom{kTwoPi * (f_r_hz * f_r_hz - f_hz * f_hz),
                   damping_rad_hz * f_hz};
  return cplx{kTwoPi * f_hz * f_hz * coupling, 0.0} / denom;
}

cplx normalized_polarizability(double f_hz, double f_r_hz,
                               double damping_rad_hz) {
  cplx out;
  kernels::active().lorentzian(f_hz, damping_rad_hz, &f_r_hz, 1, &out);
  return out;
}

double lorentzian_phase(double f_hz, double f_r_hz, double damping_rad_hz) {
  return std::atan2(kTwoPi * (f_r_hz * f_r_hz - f_hz * f_hz),
                    damping_rad_hz * f_hz);
}

double WaveguideModel::phase_const(double f_hz) const {
  return kTwoPi * f_hz * std::sqrt(eps_eff) / kSpeedOfLight;
}

WaveguideModel WaveguideModel::from_hardware(const DmaHardware& hw) {
  WaveguideModel wg;
  wg.eps_eff = hw.eps_eff;
  const double lambda = hw.leakage_fraction;
  wg.attenuation_np_m =
      lambda == 0.0
          ? 0.0
          : -std::log(1.0 - lambda) / (2.0 * hw.microstrip_length_m());
  return wg;
}

cplx waveguide_response(const WaveguideModel& wg, double f_hz, int n, int m,
                        const DmaHardware& hw) {
  if (hw.strip_of(n) != m)
    throw ValidationError("element " + std::to_string(n) +
                          " is not fed by microstrip " + std::to_string(m));
  const double l = hw.feed_distance_m(n);
  return std::exp(-wg.attenuation_np_m * l) *
         std::polar(1.0, -wg.phase_const(f_hz) * l);
}

Combiner build_combiner(const DmaHardware& hw, const WaveguideModel& wg,
                        std::span<const double> f_r_state, double f_k_hz,
                        bool normalize) {
  const int n_elems = hw.elements();
  if (static_cast<int>(f_r_state.size()) != n_elems)
    throw ValidationError("resonant frequency table size does not match element count");
  for (double fr : f_r_state) {
    if (fr < hw.f_r_min_hz || fr > hw.f_r_max_hz)
      throw ValidationError("resonant frequency outside tuning limits");
  }

  Combiner w;
  w.chains = hw.rf_chains;
  w.per_strip = hw.elements_per_strip;
  w.blocks.resize(n_elems);

  // Element responses for the whole state at once.
  std::vector<cplx> alpha(n_elems);
  kernels::active().lorentzian(f_k_hz, hw.damping_rad_hz, f_r_state.data(),
                               n_elems, alpha.data());

  // Waveguide factor depends only on the within-strip index.
  std::vector<cplx> guide(hw.elements_per_strip);
  const double beta = wg.phase_const(f_k_hz);
  for (int i = 0; i < hw.elements_per_strip; ++i) {
    const double l = i * hw.element_spacing_m;
    guide[i] = std::exp(-wg.attenuation_np_m * l) * std::polar(1.0, -beta * l);
  }

  for (int m = 0; m < w.chains; ++m) {
    cplx* col = w.column(m);
    for (int i = 0; i < w.per_strip; ++i) {
      const int n = m * w.per_strip + i;
      col[i] = hw.element_coupling_at(n) * guide[i] * alpha[n];
    }
    if (normalize) {
      const double nrm2 = kernels::active().cnorm2(col, w.per_strip);
      if (!(nrm2 > 0.0))
        throw ValidationError("combiner column " + std::to_string(m) +
                              " is all-zero; cannot normalize");
      const double inv = 1.0 / std::sqrt(nrm2);
      for (int i = 0; i < w.per_strip; ++i) col[i] *= inv;
    }
  }
  return w;
}

DmaConfiguration build_configuration(const Scenario& s,
                                     std::vector<double> f_r_table,
                                     bool normalize) {
  const int J = s.configurations;
  const int K = s.waveform.subcarriers;
  const int N = s.hardware.elements();
  if (static_cast<int>(f_r_table.size()) != J * N)
    throw ValidationError("resonant frequency table size does not match J * N");

  DmaConfiguration cfg;
  cfg.states = J;
  cfg.subcarriers = K;
  cfg.f_r_table = std::move(f_r_table);
  cfg.w.reserve(static_cast<std::size_t>(J) * K);
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);
  for (int j = 0; j < J; ++j) {
    std::span<const double> state{cfg.f_r_table.data() + j * N,
                                  static_cast<std::size_t>(N)};
    for (int k = 0; k < K; ++k) {
      cfg.w.push_back(
          build_combiner(s.hardware, wg, state, s.waveform.subcarrier_hz(k), normalize));
    }
  }
  return cfg;
}

double leakage_efficiency(const WaveguideModel& wg, double f_hz, int n_elems,
                          double spacing_m) {
  (void)f_hz;  // attenuation model is frequency-flat
  if (n_elems < 1) throw ValidationError("leakage efficiency needs n_elems >= 1");
  std::vector<double> h(n_elems);
  for (int n = 0; n < n_elems; ++n)
    h[n] = std::exp(-wg.attenuation_np_m * n * spacing_m);
  const auto s = kernels::active().sum_sumsq(h.data(), h.size());
  return (s.sum * s.sum) / (n_elems * s.sum_sq);
}

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void dump_combiner_csv(const DmaConfiguration& cfg, std::ostream& out) {
  const int chains = cfg.w.empty() ? 0 : cfg.w.front().chains;
  const int per_strip = cfg.w.empty() ? 0 : cfg.w.front().per_strip;
  out << "# dmasense combiner table states=" << cfg.states
      << " subcarriers=" << cfg.subcarriers << " chains=" << chains
      << " per_strip=" << per_strip << "\n";
  const int n_elems = chains * per_strip;
  for (int j = 0; j < cfg.states; ++j) {
    for (int n = 0; n < n_elems; ++n) {
      if (!cfg.f_r_table.empty())
        out << "# f_r," << j << "," << n << ","
            << full(cfg.f_r_table[static_cast<std::size_t>(j) * n_elems + n]) << "\n";
    }
  }
  out << "j,k,n,m,re,im\n";
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) {
      const Combiner& w = cfg.at(j, k);
      for (int m = 0; m < w.chains; ++m) {
        for (int i = 0; i < w.per_strip; ++i) {
          const cplx v = w.column(m)[i];
          out << j << "," << k << "," << (m * w.per_strip + i) << "," << m << ","
              << full(v.real()) << "," << full(v.imag()) << "\n";
        }
      }
    }
  }
}

DmaConfiguration load_combiner_csv(std::istream& in) {
  DmaConfiguration cfg;
  int chains = 0, per_strip = 0;
  std::map<std::pair<int, int>, double> f_r_entries;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# f_r,", 0) == 0) {
      std::istringstream ss(line.substr(6));
      int j, n;
      char c1, c2;
      double v;
      if (!(ss >> j >> c1 >> n >> c2 >> v))
        throw ConfigError("combiner CSV line " + std::to_string(lineno) +
                          ": malformed f_r entry");
      f_r_entries[{j, n}] = v;
      continue;
    }
    if (line.rfind("# dmasense combiner table", 0) == 0) {
      std::istringstream ss(line);
      std::string token;
      while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const int value = std::stoi(token.substr(eq + 1));
        if (key == "states") cfg.states = value;
        if (key == "subcarriers") cfg.subcarriers = value;
        if (key == "chains") chains = value;
        if (key == "per_strip") per_strip = value;
      }
      continue;
    }
    if (line.front() == '#') continue;
    if (!header_seen) {  // the j,k,n,m,re,im column header
      header_seen = true;
      if (cfg.states < 1 || cfg.subcarriers < 1 || chains < 1 || per_strip < 1)
        throw ConfigError("combiner CSV: missing or incomplete table header");
      Combiner blank;
      blank.chains = chains;
      blank.per_strip = per_strip;
      blank.blocks.assign(static_cast<std::size_t>(chains) * per_strip, cplx{0, 0});
      cfg.w.assign(static_cast<std::size_t>(cfg.states) * cfg.subcarriers, blank);
      continue;
    }
    std::istringstream ss(line);
    int j, k, n, m;
    double re, im;
    char c;
    if (!(ss >> j >> c >> k >> c >> n >> c >> m >> c >> re >> c >> im))
      throw ConfigError("combiner CSV line " + std::to_string(lineno) +
                        ": expected j,k,n,m,re,im");
    if (j < 0 || j >= cfg.states || k < 0 || k >= cfg.subcarriers ||
        n < 0 || n >= chains * per_strip || m != n / per_strip)
      throw ConfigError("combiner CSV line " + std::to_string(lineno) +
                        ": index out of range or off the owning strip");
    cfg.at(j, k).blocks[n] = cplx{re, im};
  }
  if (cfg.w.empty()) throw ConfigError("combiner CSV: no data rows");
  if (!f_r_entries.empty()) {
    cfg.f_r_table.assign(static_cast<std::size_t>(cfg.states) * chains * per_strip, 0.0);
    for (const auto& [key, v] : f_r_entries) {
      cfg.f_r_table[static_cast<std::size_t>(key.first) * chains * per_strip +
                    key.second] = v;
    }
  }
  return cfg;
}

}  // namespace dmasense
