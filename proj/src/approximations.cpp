#include "dmasense/approximations.hpp"

#include <cmath>

#include "dmasense/kernels.hpp"

namespace dmasense {

namespace {

PathSet restrict_to_path(const PathSet& paths, int path) {
  PathSet p;
  p.delay_s = {paths.delay_s[path]};
  p.aoa_rad = {paths.aoa_rad[path]};
  p.gain = {paths.gain[path]};
  p.ue_range_m = paths.ue_range_m;
  return p;
}

/// Single-path 4x4 path FIM (tau, phi, gammaR, gammaI) for one path of the
/// scenario under the given configuration.
Eigen::MatrixXd single_path_fim(const Scenario& s, const DmaConfiguration& cfg,
                                int path, PathSet* restricted = nullptr,
                                ManifoldTensor* manifolds_out = nullptr) {
  const PathSet all = make_paths(s);
  PathSet one = restrict_to_path(all, path);
  ManifoldTensor manifolds = build_manifolds(s, one, cfg);
  Eigen::MatrixXd j = path_fim(s, one, manifolds);
  if (restricted) *restricted = std::move(one);
  if (manifolds_out) *manifolds_out = std::move(manifolds);
  return j;
}

}  // namespace

std::vector<double> weights_omega(const Scenario& s, const PathSet& paths,
                                  const ManifoldTensor& manifolds, int path) {
  const double scale = 2.0 * s.waveform.tx_power_w *
                       std::norm(paths.gain[path]) / s.waveform.noise_power_w;
  std::vector<double> omega(static_cast<std::size_t>(manifolds.states) *
                            manifolds.subcarriers);
  for (int j = 0; j < manifolds.states; ++j) {
    for (int k = 0; k < manifolds.subcarriers; ++k) {
      const auto g = manifolds.g_at(j, k, path);
      omega[static_cast<std::size_t>(j) * manifolds.subcarriers + k] =
          scale * kernels::active().cnorm2(g.data(), g.size());
    }
  }
  return omega;
}

std::vector<double> subcarrier_grid_over_states(const Scenario& s) {
  const int J = s.configurations, K = s.waveform.subcarriers;
  std::vector<double> grid(static_cast<std::size_t>(J) * K);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < K; ++k)
      grid[static_cast<std::size_t>(j) * K + k] = s.waveform.subcarrier_hz(k);
  return grid;
}

EffectiveBandwidth effective_bandwidth(std::span<const double> omega,
                                       std::span<const double> grid_hz) {
  if (omega.size() != grid_hz.size())
    throw ValidationError("weight grid and frequency grid sizes differ");
  const auto m =
      kernels::active().weighted_moments(omega.data(), grid_hz.data(), omega.size());
  if (m.weight_sum <= 0.0)
    throw ValidationError("all-zero weights: effective bandwidth undefined");
  return {m.weight_sum, m.mean, m.variance};
}

DelayInfoDecomposition delay_info_decomposition(std::span<const double> omega,
                                                std::span<const double> grid_hz) {
  const EffectiveBandwidth bw = effective_bandwidth(omega, grid_hz);
  DelayInfoDecomposition d;
  double swf2 = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i)
    swf2 += omega[i] * grid_hz[i] * grid_hz[i];
  const double four_pi2 = 4.0 * kPi * kPi;
  d.j_tautau = four_pi2 * swf2;
  d.decomposed =
      four_pi2 * (bw.beta_eff2_hz2 + bw.mean_hz * bw.mean_hz) * bw.weight_sum;
  d.residual = std::abs(d.j_tautau - d.decomposed) / d.j_tautau;
  return d;
}

DelayEfimCheck efim_delay_check(const Scenario& s, const DmaConfiguration& cfg,
                                int path) {
  const PathSet all = make_paths(s);
  const PathSet one = restrict_to_path(all, path);
  const ManifoldTensor manifolds = build_manifolds(s, one, cfg);
  const PathParamIndex eta{1};
  const int cols[3] = {eta.tau(0), eta.gamma_re(0), eta.gamma_im(0)};

  // Eliminating the gain cancels all but ~(beta_eff/f_c)^2 of the raw delay
  // information, which can be 1e-8 at narrow bandwidths; assemble the 3x3
  // FIM and its Schur complement in extended precision so the comparison is
  // not rounded away before it happens.
  using lreal = long double;
  using lcplx = std::complex<lreal>;
  lcplx gram[3][3] = {};
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) {
      const Eigen::MatrixXcd d = mean_derivatives(s, one, manifolds, j, k);
      for (int u = 0; u < 3; ++u) {
        for (int v = u; v < 3; ++v) {
          for (int m = 0; m < manifolds.chains; ++m) {
            gram[u][v] += std::conj(static_cast<lcplx>(d(m, cols[u]))) *
                          static_cast<lcplx>(d(m, cols[v]));
          }
        }
      }
    }
  }
  const lreal scale = 2.0L / static_cast<lreal>(s.waveform.noise_power_w);
  lreal j3[3][3];
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v)
      j3[u][v] = scale * (v >= u ? gram[u][v].real() : gram[v][u].real());

  // Schur complement of the 2x2 gain block
  const lreal det = j3[1][1] * j3[2][2] - j3[1][2] * j3[1][2];
  const lreal diag_scale = j3[1][1] * j3[2][2];
  if (!(det > diag_scale * 1e-24L))
    throw SingularMatrixError("nuisance FIM block is singular or near-singular "
                              "(gain block of the delay EFIM check)");
  const lreal b0 = j3[0][1], b1 = j3[0][2];
  const lreal correction =
      (b0 * (j3[2][2] * b0 - j3[1][2] * b1) + b1 * (j3[1][1] * b1 - j3[1][2] * b0)) /
      det;

  DelayEfimCheck out;
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) out.sub_fim(u, v) = static_cast<double>(j3[u][v]);
  out.j_tautau_raw = static_cast<double>(j3[0][0]);
  out.efim_delay = static_cast<double>(j3[0][0] - correction);

  const std::vector<double> omega = weights_omega(s, one, manifolds, 0);
  const std::vector<double> grid = subcarrier_grid_over_states(s);
  out.bandwidth = effective_bandwidth(omega, grid);
  out.predicted =
      4.0 * kPi * kPi * out.bandwidth.beta_eff2_hz2 * out.bandwidth.weight_sum;
  const double denom = std::max(std::abs(out.efim_delay), std::abs(out.predicted));
  out.residual =
      denom == 0.0 ? 0.0 : std::abs(out.efim_delay - out.predicted) / denom;
  return out;
}

std::vector<double> power_profile(const Combiner& w) {
  // Disjoint column supports: element n meets exactly one chain, and the
  // block layout is already element-ordered.
  std::vector<double> p(w.elements());
  double total = 0.0;
  for (int n = 0; n < w.elements(); ++n) {
    p[n] = std::norm(w.blocks[n]);
    total += p[n];
  }
  if (!(total > 0.0)) throw ValidationError("all-zero combiner: power profile undefined");
  for (double& v : p) v /= total;
  return p;
}

ApertureMoment effective_aperture(std::span<const double> profile,
                                  double spacing_m) {
  std::vector<double> x(profile.size());
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = n * spacing_m;
  const auto m =
      kernels::active().weighted_moments(profile.data(), x.data(), x.size());
  return {m.mean, m.variance};
}

AngularInfoCheck angular_info_approx(const Scenario& s,
                                     const DmaConfiguration& cfg, int path) {
  PathSet one;
  ManifoldTensor manifolds;
  const Eigen::MatrixXd j4 = single_path_fim(s, cfg, path, &one, &manifolds);
  const PathParamIndex eta{1};
  const Eigen::MatrixXd sub =
      submatrix(j4, {eta.phi(0), eta.gamma_re(0), eta.gamma_im(0)});

  AngularInfoCheck out;
  out.raw_term = sub(0, 0);
  out.efim_angular = efim(sub, {0})(0, 0);

  const double scale = 2.0 * s.waveform.tx_power_w * std::norm(one.gain[0]) /
                       s.waveform.noise_power_w;
  const double cos_phi = std::cos(one.aoa_rad[0]);
  double acc = 0.0;
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) {
      const double kappa =
          kTwoPi * s.waveform.subcarrier_hz(k) * cos_phi / kSpeedOfLight;
      const auto g = manifolds.g_at(j, k, 0);
      const double gain = kernels::active().cnorm2(g.data(), g.size());
      const auto aperture =
          effective_aperture(power_profile(cfg.at(j, k)), s.hardware.element_spacing_m);
      acc += kappa * kappa * gain * aperture.moment_m2;
    }
  }
  out.approx = scale * acc;
  out.ratio = out.approx == 0.0 ? (out.efim_angular == 0.0 ? 1.0 : 0.0)
                                : out.efim_angular / out.approx;
  return out;
}

double leakage_inflated_crb(double crb0, double a_leak) {
  if (!(a_leak > 0.0 && a_leak <= 1.0))
    throw ValidationError("leakage efficiency out of range (0,1]");
  return crb0 / a_leak;
}

double scenario_leakage_efficiency(const Scenario& s) {
  return leakage_efficiency(WaveguideModel::from_hardware(s.hardware),
                            s.waveform.carrier_hz, s.hardware.elements_per_strip,
                            s.hardware.element_spacing_m);
}

Eigen::Matrix2d ue_position_matrix(double j_tautau, double j_phiphi,
                                   double phi0_rad, double r0_m) {
  const double c = std::cos(phi0_rad), sn = std::sin(phi0_rad);
  Eigen::Vector2d dtau(c / kSpeedOfLight, sn / kSpeedOfLight);
  Eigen::Vector2d dphi(-sn / r0_m, c / r0_m);
  return j_tautau * dtau * dtau.transpose() + j_phiphi * dphi * dphi.transpose();
}

Eigen::Matrix2d ue_position_efim_approx(const Scenario& s,
                                        const DmaConfiguration& cfg) {
  const DelayEfimCheck delay = efim_delay_check(s, cfg, 0);
  const AngularInfoCheck angular = angular_info_approx(s, cfg, 0);
  const PathSet paths = make_paths(s);
  return ue_position_matrix(delay.efim_delay, angular.efim_angular,
                            paths.aoa_rad[0], paths.ue_range_m);
}

ApertureGainGrid aperture_gain_grid(const Scenario& s, const DmaConfiguration& cfg, int path) {
  const PathSet paths = make_paths(s);
  const PathSet one = restrict_to_path(paths, path);
  const ManifoldTensor manifolds = build_manifolds(s, one, cfg);
  ApertureGainGrid out;
  const std::size_t total = static_cast<std::size_t>(cfg.states) * cfg.subcarriers;
  out.centroid_m.reserve(total);
  out.d_eff2_m2.reserve(total);
  out.gain.reserve(total);
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) {
      const auto aperture =
          effective_aperture(power_profile(cfg.at(j, k)), s.hardware.element_spacing_m);
      out.centroid_m.push_back(aperture.centroid_m);
      out.d_eff2_m2.push_back(aperture.moment_m2);
      const auto g = manifolds.g_at(j, k, 0);
      out.gain.push_back(kernels::active().cnorm2(g.data(), g.size()));
    }
  }
  return out;
}

namespace {

DmaConfiguration scaled_configuration(const Scenario& s,
                                      const std::vector<double>& f_r_table,
                                      const std::vector<double>& sqrt_scale_per_state) {
  DmaConfiguration cfg = build_configuration(s, f_r_table, /*normalize=*/false);
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) cfg.at(j, k).scale(sqrt_scale_per_state[j]);
  }
  return cfg;
}

}  // namespace

double leakage_state_scaling_residual(const Scenario& s,
                                    const std::vector<double>& f_r_table,
                                    const std::vector<double>& a_leak_per_state) {
  if (static_cast<int>(a_leak_per_state.size()) != s.configurations)
    throw ValidationError("per-state leakage factor count does not match J");
  std::vector<double> sqrt_a(a_leak_per_state.size());
  for (std::size_t j = 0; j < sqrt_a.size(); ++j) sqrt_a[j] = std::sqrt(a_leak_per_state[j]);

  const PathSet paths = make_paths(s);
  const DmaConfiguration base =
      build_configuration(s, f_r_table, /*normalize=*/false);
  const DmaConfiguration scaled = scaled_configuration(s, f_r_table, sqrt_a);

  const auto fim_base = path_fim_per_state(s, paths, build_manifolds(s, paths, base));
  const auto fim_scaled =
      path_fim_per_state(s, paths, build_manifolds(s, paths, scaled));

  double worst = 0.0;
  for (int j = 0; j < s.configurations; ++j) {
    const Eigen::MatrixXd expected = a_leak_per_state[j] * fim_base[j];
    const double denom = expected.norm();
    worst = std::max(worst, (fim_scaled[j] - expected).norm() / denom);
  }
  return worst;
}

double leakage_crb_inflation_residual(const Scenario& s,
                                    const std::vector<double>& f_r_table,
                                    double a_leak) {
  const PathSet paths = make_paths(s);
  const DmaConfiguration base =
      build_configuration(s, f_r_table, /*normalize=*/false);
  const std::vector<double> sqrt_a(s.configurations, std::sqrt(a_leak));
  const DmaConfiguration scaled = scaled_configuration(s, f_r_table, sqrt_a);

  const Eigen::MatrixXd j0 = path_fim(s, paths, build_manifolds(s, paths, base));
  const Eigen::MatrixXd jl = path_fim(s, paths, build_manifolds(s, paths, scaled));

  double worst = 0.0;
  for (int u = 0; u < j0.rows(); ++u) {
    const double crb0 = crb_entry(j0, u);
    const double crb_leak = crb_entry(jl, u);
    worst = std::max(worst, std::abs(crb_leak * a_leak - crb0) / crb0);
  }
  return worst;
}

}  // namespace dmasense
