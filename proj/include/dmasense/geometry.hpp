#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dmasense/scenario.hpp"

namespace dmasense {

/// Per-path delay, angle of arrival and complex gain; path 0 is the direct
/// UE path, paths 1..S are single-bounce scatterer paths.
struct PathSet {
  std::vector<double> delay_s;
  std::vector<double> aoa_rad;
  std::vector<cplx> gain;
  double ue_range_m = 0.0;  // r_0

  int paths() const { return static_cast<int>(delay_s.size()); }
};

/// Index helpers for the path-domain parameter vector
/// eta = [tau_0..tau_{L-1}, phi_0.., gammaR_0.., gammaI_0..].
struct PathParamIndex {
  int paths;
  int size() const { return 4 * paths; }
  int tau(int l) const { return l; }
  int phi(int l) const { return paths + l; }
  int gamma_re(int l) const { return 2 * paths + l; }
  int gamma_im(int l) const { return 3 * paths + l; }
};

/// Index helpers for the position-domain parameter vector
/// xi = [p_U, q_1..q_S, gammaR_0.., gammaI_0..].
struct PositionParamIndex {
  int scatterers;
  int paths() const { return scatterers + 1; }
  int size() const { return 2 * (scatterers + 1) + 2 * paths(); }
  int position_size() const { return 2 * (scatterers + 1); }
  int ue(int axis) const { return axis; }
  int sp(int s, int axis) const { return 2 * (s + 1) + axis; }
  int gamma_re(int l) const { return position_size() + l; }
  int gamma_im(int l) const { return position_size() + paths() + l; }
};

std::vector<double> path_delays(const SceneGeometry& g);
std::vector<double> path_aoas(const SceneGeometry& g);
std::vector<cplx> path_gains(const Scenario& s);
PathSet make_paths(const Scenario& s);

/// Jacobian T with [T]_{u,v} = d eta_u / d xi_v; rows ordered per
/// PathParamIndex, columns per PositionParamIndex. Gain rows map one-to-one
/// onto gain columns; position derivatives of the gains are zero.
Eigen::MatrixXd geometry_jacobian(const Scenario& s, const PathSet& paths);

}  // namespace dmasense
