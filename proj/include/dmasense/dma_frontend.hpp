#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dmasense/scenario.hpp"

namespace dmasense {

/// Raw magnetic polarizability 2*pi*f^2*F / (2*pi*f_r^2 - 2*pi*f^2 + j*Gamma*f).
cplx polarizability(double f_hz, double f_r_hz, double damping_rad_hz,
                    double coupling);

/// Polarizability normalized by Q(f)*F with Q(f) = 2*pi*f/Gamma:
///   Gamma*f / (2*pi*(f_r^2 - f^2) + j*Gamma*f).
/// Equals -j*cos(Psi)*exp(j*Psi) with Psi from lorentzian_phase; magnitude
/// cos(Psi) <= 1, exactly -j on resonance.
cplx normalized_polarizability(double f_hz, double f_r_hz, double damping_rad_hz);

/// Psi(f, f_r) = atan2(2*pi*(f_r^2 - f^2), Gamma*f), in (-pi/2, pi/2).
double lorentzian_phase(double f_hz, double f_r_hz, double damping_rad_hz);

/// Waveguide propagation along a microstrip: flat attenuation constant plus
/// the TEM-like phase constant beta_g(f) = 2*pi*f*sqrt(eps_eff)/c.
struct WaveguideModel {
  double attenuation_np_m = 0.0;  // alpha_g
  double eps_eff = 3.0;

  double phase_const(double f_hz) const;

  /// Maps the hardware leakage fraction Lambda onto the attenuation
  /// constant via exp(-2*alpha_g*L_ms) = 1 - Lambda with L_ms the
  /// microstrip length, so a fraction Lambda of the power has leaked by
  /// the end of the strip.
  static WaveguideModel from_hardware(const DmaHardware& hw);
};

/// exp(-(alpha_g + j*beta_g(f)) * l_{n,m}) for element n on microstrip m
/// (0-based). Throws ValidationError if n is not fed by microstrip m.
cplx waveguide_response(const WaveguideModel& wg, double f_hz, int n, int m,
                        const DmaHardware& hw);

/// Analog combining matrix for one DMA state at one subcarrier. Column m is
/// supported only on the rows of microstrip m; the nonzero blocks are stored
/// contiguously (per_strip entries per chain).
struct Combiner {
  int chains = 0;
  int per_strip = 0;
  std::vector<cplx> blocks;  // chains * per_strip, column-major by chain

  int elements() const { return chains * per_strip; }
  const cplx* column(int m) const { return blocks.data() + m * per_strip; }
  cplx* column(int m) { return blocks.data() + m * per_strip; }
  /// Dense (n, m) entry; zero off the owning strip.
  cplx entry(int n, int m) const {
    return (n / per_strip == m) ? blocks[m * per_strip + n % per_strip]
                                : cplx{0.0, 0.0};
  }
  void scale(double a) {
    for (cplx& v : blocks) v *= a;
  }
};

/// Assemble one combiner with entries
///   c_{n,m} * exp(-(alpha_g + j*beta_g)*l_{n,m}) * alpha_bar(f_k, f_r[n])
/// then (optionally) scale each column to unit norm, which makes
/// W^H W = I exact because the column supports are disjoint.
/// Throws ValidationError on tuning-limit violations or an all-zero column.
Combiner build_combiner(const DmaHardware& hw, const WaveguideModel& wg,
                        std::span<const double> f_r_state, double f_k_hz,
                        bool normalize = true);

/// All combiners for a J-state resonant-frequency table (states * N values,
/// state-major) across the scenario's subcarrier grid.
struct DmaConfiguration {
  int states = 0;
  int subcarriers = 0;
  std::vector<double> f_r_table;
  std::vector<Combiner> w;  // w[j * subcarriers + k]

  const Combiner& at(int j, int k) const { return w[j * subcarriers + k]; }
  Combiner& at(int j, int k) { return w[j * subcarriers + k]; }
};

DmaConfiguration build_configuration(const Scenario& s,
                                     std::vector<double> f_r_table,
                                     bool normalize = true);

/// Normalized leakage efficiency |sum h_n|^2 / (N * sum |h_n|^2) of the
/// attenuation-only profile h_n = exp(-alpha_g*(n-1)*spacing); 1 iff the
/// profile is uniform.
double leakage_efficiency(const WaveguideModel& wg, double f_hz, int n_elems,
                          double spacing_m);

/// Combiner table dump: '#'-prefixed resonant-frequency lines followed by
/// one "j,k,n,m,re,im" row per nonzero entry, full precision. load_ restores
/// both the entries and the f_r table, so tuned configurations round-trip.
void dump_combiner_csv(const DmaConfiguration& cfg, std::ostream& out);
DmaConfiguration load_combiner_csv(std::istream& in);

}  // namespace dmasense
