#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dmasense/common.hpp"

namespace dmasense {

/// OFDM uplink waveform. The subcarrier grid is
///   f_k = f_c + (k - (K-1)/2) * delta_f,  k = 0..K-1 (0-based),
/// strictly increasing and symmetric about the carrier.
struct Waveform {
  double carrier_hz = 20e9;           // f_c
  double spacing_hz = 500e6 / 128.0;  // delta_f
  int subcarriers = 128;              // K
  double tx_power_w = 0.01;           // P
  int pilot_symbols = 1;              // T
  double noise_power_w = 1e-13;       // sigma^2 per complex entry

  double bandwidth_hz() const { return spacing_hz * subcarriers; }
  double subcarrier_hz(int k) const {
    return carrier_hz + (k - 0.5 * (subcarriers - 1)) * spacing_hz;
  }
  std::vector<double> subcarrier_grid() const;
};

/// DMA receiver hardware: rf_chains microstrips with elements_per_strip
/// tunable metamaterial elements each, arranged as a ULA along x.
struct DmaHardware {
  int rf_chains = 4;          // N_RF
  int elements_per_strip = 8; // N_E
  double element_spacing_m = 0.5 * kSpeedOfLight / 20e9;  // d_x
  double damping_rad_hz = kTwoPi * 20e9 / 100.0;          // Gamma (Q_c = 100)
  double coupling = 1.0;      // F_cpl
  std::vector<cplx> element_coupling;  // c_{n,m} per element; empty = all 1
  double f_r_min_hz = 20e9 - 250e6;
  double f_r_max_hz = 20e9 + 250e6;
  double leakage_fraction = 0.8;  // Lambda in [0,1)
  double eps_eff = 3.0;           // effective waveguide permittivity

  int elements() const { return rf_chains * elements_per_strip; }
  double tuning_bandwidth_hz() const { return f_r_max_hz - f_r_min_hz; }
  /// Microstrip owning element n (both 0-based): m = n / N_E.
  int strip_of(int n) const { return n / elements_per_strip; }
  /// Waveguide path length from element n to its RF chain input.
  double feed_distance_m(int n) const {
    return (n % elements_per_strip) * element_spacing_m;
  }
  cplx element_coupling_at(int n) const {
    return element_coupling.empty() ? cplx{1.0, 0.0} : element_coupling[n];
  }
  double microstrip_length_m() const {
    return elements_per_strip * element_spacing_m;
  }
};

/// 2-D scene: receiver reference point, UE, and S scattering points.
struct SceneGeometry {
  std::array<double, 2> rx{0.0, 0.0};  // p_D
  std::array<double, 2> ue{3.0, 3.0};  // p_U
  std::vector<std::array<double, 2>> sps;  // q_s
  std::vector<cplx> reflections;           // per-SP reflection coefficient

  int scatterers() const { return static_cast<int>(sps.size()); }
};

struct Scenario {
  Waveform waveform;
  DmaHardware hardware;
  SceneGeometry geometry;
  int configurations = 4;  // J

  int paths() const { return geometry.scatterers() + 1; }  // L = S + 1
  double wavelength_m() const { return kSpeedOfLight / waveform.carrier_hz; }

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  /// FNV-1a over the canonical serialization; stable across runs.
  std::uint64_t hash() const;
};

/// Scenario populated with the default simulation parameters
/// (20 GHz carrier, 32 elements on 4 microstrips, K = 128 over 500 MHz,
/// J = 4 states, UE at [3,3] m, SPs at [5,3] and [4,4] m).
Scenario default_scenario();

/// Parse the documented key-value config format; unset fields keep their
/// defaults. Throws ConfigError on malformed input and ValidationError if
/// the resulting scenario violates an invariant.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in);

void save_scenario(const Scenario& s, std::ostream& out);
std::string save_scenario_string(const Scenario& s);

}  // namespace dmasense
