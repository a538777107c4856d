#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "dmasense/fisher_bounds.hpp"

namespace dmasense {

/// SNR-like weights omega_{j,k} = (2*P*|gamma_l|^2/sigma^2) * ||g_{j,l}[k]||^2
/// for one path, flattened j-major over the (state, subcarrier) grid.
std::vector<double> weights_omega(const Scenario& s, const PathSet& paths,
                                  const ManifoldTensor& manifolds, int path);

/// Subcarrier frequency per flattened (state, subcarrier) index, aligned
/// with weights_omega.
std::vector<double> subcarrier_grid_over_states(const Scenario& s);

struct EffectiveBandwidth {
  double weight_sum = 0.0;
  double mean_hz = 0.0;      // weighted mean frequency
  double beta_eff2_hz2 = 0.0;  // centered frequency spread
};

/// Weighted mean and central second moment of the grid frequencies.
/// Throws ValidationError when every weight is zero.
EffectiveBandwidth effective_bandwidth(std::span<const double> omega,
                                       std::span<const double> grid_hz);

struct DelayInfoDecomposition {
  double j_tautau = 0.0;     // 4*pi^2 * sum omega * f^2
  double decomposed = 0.0;   // 4*pi^2 * (beta_eff^2 + f_bar^2) * sum omega
  double residual = 0.0;     // relative difference
};

DelayInfoDecomposition delay_info_decomposition(std::span<const double> omega,
                                                std::span<const double> grid_hz);

struct DelayEfimCheck {
  double efim_delay = 0.0;        // exact EFIM entry, gain nuisance removed
  double predicted = 0.0;  // 4*pi^2 * beta_eff^2 * sum omega
  double residual = 0.0;
  double j_tautau_raw = 0.0;      // pre-elimination delay information
  EffectiveBandwidth bandwidth;
  Eigen::Matrix3d sub_fim;  // FIM over (tau, gammaR, gammaI)
};

/// Exact single-path delay EFIM on (tau, gammaR, gammaI) versus the
/// effective-bandwidth prediction, for the selected path of the scenario.
DelayEfimCheck efim_delay_check(const Scenario& s, const DmaConfiguration& cfg,
                                int path = 0);

/// Metamaterial element power profile p_n induced by a combiner; sums to 1.
std::vector<double> power_profile(const Combiner& w);

struct ApertureMoment {
  double centroid_m = 0.0;
  double moment_m2 = 0.0;  // D_eff^2
};

ApertureMoment effective_aperture(std::span<const double> profile,
                                  double spacing_m);

struct AngularInfoCheck {
  double efim_angular = 0.0;  // exact EFIM entry on (phi, gammaR, gammaI)
  double raw_term = 0.0;      // pre-elimination sum ||W^H da/dphi||^2 term
  double approx = 0.0;        // gain x effective-aperture approximation
  double ratio = 0.0;         // efim_angular / approx
};

/// Exact single-path angular information (gain nuisance removed) against the
/// coherent-gain x aperture-moment approximation. The raw pre-elimination
/// term is reported for reference; it carries the absolute element positions
/// and is not the quantity the approximation targets.
AngularInfoCheck angular_info_approx(const Scenario& s,
                                     const DmaConfiguration& cfg, int path = 0);

/// First-order leakage-inflated CRB: crb0 / a_leak, a_leak in (0, 1].
double leakage_inflated_crb(double crb0, double a_leak);

/// Per-strip leakage efficiency of the scenario at the carrier.
double scenario_leakage_efficiency(const Scenario& s);

/// Rank-2 UE-position information built from the direct-path delay/AoA
/// informations and their position Jacobians.
Eigen::Matrix2d ue_position_matrix(double j_tautau, double j_phiphi,
                                   double phi0_rad, double r0_m);

/// Same, with the scalars taken from the exact single-path EFIM entries.
Eigen::Matrix2d ue_position_efim_approx(const Scenario& s,
                                        const DmaConfiguration& cfg);

struct ApertureGainGrid {
  std::vector<double> centroid_m;  // per (j,k), j-major
  std::vector<double> d_eff2_m2;
  std::vector<double> gain;  // ||g_{j,path}[k]||^2
};

ApertureGainGrid aperture_gain_grid(const Scenario& s, const DmaConfiguration& cfg, int path = 0);

/// Max relative deviation of per-state FIM contributions from the A_j
/// scaling law when each state's combiner entries are scaled by
/// sqrt(a_leak[j]) with column normalization disabled.
double leakage_state_scaling_residual(const Scenario& s,
                                    const std::vector<double>& f_r_table,
                                    const std::vector<double>& a_leak_per_state);

/// Max relative deviation of CRB(theta_u) * A from CRB_0(theta_u) over all
/// path-domain parameters under a uniform leakage factor A (normalization
/// disabled).
double leakage_crb_inflation_residual(const Scenario& s,
                                    const std::vector<double>& f_r_table,
                                    double a_leak);

}  // namespace dmasense
