#include "dmasense/oracles.hpp"

#include <cmath>

namespace dmasense {

Eigen::MatrixXd numeric_geometry_jacobian(const Scenario& s, double step_m) {
  const PathSet base = make_paths(s);
  const int L = base.paths();
  const int S = s.geometry.scatterers();
  const PathParamIndex eta{L};
  const PositionParamIndex xi{S};
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(eta.size(), xi.size());

  auto eval = [&](const SceneGeometry& g, int l, bool delay) {
    return delay ? path_delays(g)[l] : path_aoas(g)[l];
  };
  // five-point stencil: truncation stays below the rounding noise even for
  // entries that are coincidentally near zero
  auto column = [&](int col, auto&& perturb) {
    SceneGeometry p1 = s.geometry, m1 = s.geometry;
    SceneGeometry p2 = s.geometry, m2 = s.geometry;
    perturb(p1, +step_m);
    perturb(m1, -step_m);
    perturb(p2, +2.0 * step_m);
    perturb(m2, -2.0 * step_m);
    for (int l = 0; l < L; ++l) {
      const double d_tau1 = eval(p1, l, true) - eval(m1, l, true);
      const double d_tau2 = eval(p2, l, true) - eval(m2, l, true);
      t(eta.tau(l), col) = (8.0 * d_tau1 - d_tau2) / (12.0 * step_m);
      // wrap the AoA differences so the atan2 branch cut cannot leak in
      const double d_phi1 =
          std::remainder(eval(p1, l, false) - eval(m1, l, false), kTwoPi);
      const double d_phi2 =
          std::remainder(eval(p2, l, false) - eval(m2, l, false), kTwoPi);
      t(eta.phi(l), col) = (8.0 * d_phi1 - d_phi2) / (12.0 * step_m);
    }
  };

  for (int axis = 0; axis < 2; ++axis) {
    column(xi.ue(axis), [&](SceneGeometry& g, double h) { g.ue[axis] += h; });
  }
  for (int sp = 0; sp < S; ++sp) {
    for (int axis = 0; axis < 2; ++axis) {
      column(xi.sp(sp, axis),
             [&](SceneGeometry& g, double h) { g.sps[sp][axis] += h; });
    }
  }
  for (int l = 0; l < L; ++l) {
    t(eta.gamma_re(l), xi.gamma_re(l)) = 1.0;
    t(eta.gamma_im(l), xi.gamma_im(l)) = 1.0;
  }
  return t;
}

namespace {

/// Stack the noise-free means over every (state, subcarrier).
Eigen::VectorXcd stacked_means(const Scenario& s, const PathSet& paths,
                               const DmaConfiguration& cfg,
                               const ManifoldTensor& manifolds) {
  const int chains = manifolds.chains;
  Eigen::VectorXcd out(static_cast<Eigen::Index>(cfg.states) * cfg.subcarriers *
                       chains);
  for (int j = 0; j < cfg.states; ++j) {
    for (int k = 0; k < cfg.subcarriers; ++k) {
      const std::vector<cplx> mu = mean_observation(s, paths, manifolds, j, k);
      for (int m = 0; m < chains; ++m)
        out(stack_index(cfg.subcarriers, chains, j, k, m)) = mu[m];
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd numeric_path_fim(const Scenario& s, const DmaConfiguration& cfg,
                                 const FdSteps& steps) {
  const PathSet base = make_paths(s);
  const int L = base.paths();
  const PathParamIndex eta{L};
  const ManifoldTensor base_manifolds = build_manifolds(s, base, cfg);

  auto means_at = [&](const PathSet& p, bool aoa_changed) {
    if (aoa_changed) {
      const ManifoldTensor manifolds = build_manifolds(s, p, cfg);
      return stacked_means(s, p, cfg, manifolds);
    }
    return stacked_means(s, p, cfg, base_manifolds);
  };

  Eigen::MatrixXcd d(stacked_means(s, base, cfg, base_manifolds).size(),
                     eta.size());
  for (int u = 0; u < eta.size(); ++u) {
    PathSet plus = base, minus = base;
    double h = 0.0;
    bool aoa_changed = false;
    const int l = u % L;
    if (u < L) {
      h = steps.tau_s;
      plus.delay_s[l] += h;
      minus.delay_s[l] -= h;
    } else if (u < 2 * L) {
      h = steps.phi_rad;
      plus.aoa_rad[l] += h;
      minus.aoa_rad[l] -= h;
      aoa_changed = true;
    } else if (u < 3 * L) {
      h = steps.gain;
      plus.gain[l] += h;
      minus.gain[l] -= h;
    } else {
      h = steps.gain;
      plus.gain[l] += cplx{0.0, h};
      minus.gain[l] -= cplx{0.0, h};
    }
    d.col(u) = (means_at(plus, aoa_changed) - means_at(minus, aoa_changed)) /
               (2.0 * h);
  }
  return (2.0 / s.waveform.noise_power_w) * (d.adjoint() * d).real();
}

}  // namespace dmasense
