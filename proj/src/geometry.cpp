#include "dmasense/geometry.hpp"

#include <cmath>

namespace dmasense {

namespace {

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

std::vector<double> path_delays(const SceneGeometry& g) {
  std::vector<double> tau;
  tau.reserve(g.sps.size() + 1);
  tau.push_back(dist(g.ue, g.rx) / kSpeedOfLight);
  for (const auto& q : g.sps)
    tau.push_back((dist(g.ue, q) + dist(q, g.rx)) / kSpeedOfLight);
  return tau;
}

std::vector<double> path_aoas(const SceneGeometry& g) {
  std::vector<double> phi;
  phi.reserve(g.sps.size() + 1);
  phi.push_back(std::atan2(g.ue[1] - g.rx[1], g.ue[0] - g.rx[0]));
  for (const auto& q : g.sps)
    phi.push_back(std::atan2(q[1] - g.rx[1], q[0] - g.rx[0]));
  return phi;
}

std::vector<cplx> path_gains(const Scenario& s) {
  // Free-space style amplitudes: lambda/(4*pi*r) for the direct path and
  // reflection * lambda/(4*pi) / (r_ue_sp * r_sp_rx) for bounce paths.
  const SceneGeometry& g = s.geometry;
  const double lam = s.wavelength_m();
  std::vector<cplx> gains;
  gains.reserve(g.sps.size() + 1);
  gains.emplace_back(lam / (4.0 * kPi * dist(g.ue, g.rx)), 0.0);
  for (std::size_t i = 0; i < g.sps.size(); ++i) {
    const cplx refl = g.reflections.empty() ? cplx{1.0, 0.0} : g.reflections[i];
    gains.push_back(refl * (lam / (4.0 * kPi)) /
                    (dist(g.ue, g.sps[i]) * dist(g.sps[i], g.rx)));
  }
  return gains;
}

PathSet make_paths(const Scenario& s) {
  PathSet p;
  p.delay_s = path_delays(s.geometry);
  p.aoa_rad = path_aoas(s.geometry);
  p.gain = path_gains(s);
  p.ue_range_m = dist(s.geometry.ue, s.geometry.rx);
  return p;
}

Eigen::MatrixXd geometry_jacobian(const Scenario& s, const PathSet& paths) {
  const SceneGeometry& g = s.geometry;
  const int S = g.scatterers();
  const PathParamIndex eta{paths.paths()};
  const PositionParamIndex xi{S};
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(eta.size(), xi.size());

  const double inv_c = 1.0 / kSpeedOfLight;

  // Direct path: d tau_0 / d p_U and d phi_0 / d p_U.
  {
    const double phi0 = paths.aoa_rad[0];
    const double r0 = paths.ue_range_m;
    T(eta.tau(0), xi.ue(0)) = inv_c * std::cos(phi0);
    T(eta.tau(0), xi.ue(1)) = inv_c * std::sin(phi0);
    T(eta.phi(0), xi.ue(0)) = -std::sin(phi0) / r0;
    T(eta.phi(0), xi.ue(1)) = std::cos(phi0) / r0;
  }

  // Bounce paths: delay depends on both endpoints, AoA only on the SP.
  for (int sp = 0; sp < S; ++sp) {
    const int l = sp + 1;
    const auto& q = g.sps[sp];
    const double d_uq = dist(g.ue, q);
    const double d_qr = dist(q, g.rx);
    const double ux = (g.ue[0] - q[0]) / d_uq, uy = (g.ue[1] - q[1]) / d_uq;
    const double vx = (q[0] - g.rx[0]) / d_qr, vy = (q[1] - g.rx[1]) / d_qr;
    T(eta.tau(l), xi.ue(0)) = inv_c * ux;
    T(eta.tau(l), xi.ue(1)) = inv_c * uy;
    T(eta.tau(l), xi.sp(sp, 0)) = inv_c * (-ux + vx);
    T(eta.tau(l), xi.sp(sp, 1)) = inv_c * (-uy + vy);
    const double phil = paths.aoa_rad[l];
    T(eta.phi(l), xi.sp(sp, 0)) = -std::sin(phil) / d_qr;
    T(eta.phi(l), xi.sp(sp, 1)) = std::cos(phil) / d_qr;
  }

  // Gains are coordinates of xi themselves.
  for (int l = 0; l < paths.paths(); ++l) {
    T(eta.gamma_re(l), xi.gamma_re(l)) = 1.0;
    T(eta.gamma_im(l), xi.gamma_im(l)) = 1.0;
  }
  return T;
}

}  // namespace dmasense
