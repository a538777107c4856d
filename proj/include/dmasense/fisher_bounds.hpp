#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dmasense/signal_model.hpp"

namespace dmasense {

inline constexpr double kConditionThreshold = 1e12;

/// Analytic derivatives of mu_{j,k} with respect to the path-domain
/// parameters, columns ordered per PathParamIndex. The sqrt(P) of the mean
/// is folded into the derivatives; the 2/sigma^2 FIM prefactor is not.
Eigen::MatrixXcd mean_derivatives(const Scenario& s, const PathSet& paths,
                                  const ManifoldTensor& manifolds, int j, int k);

/// Path-domain FIM J_eta = (2/sigma^2) * Re sum_{j,k} D^H D, accumulated in
/// a fixed (j, k) order; symmetric PSD.
Eigen::MatrixXd path_fim(const Scenario& s, const PathSet& paths,
                         const ManifoldTensor& manifolds);

/// Per-state contributions J_eta^{(j)}; their sum is path_fim.
std::vector<Eigen::MatrixXd> path_fim_per_state(const Scenario& s,
                                                const PathSet& paths,
                                                const ManifoldTensor& manifolds);

/// Geometry-domain FIM T' * J_eta * T.
Eigen::MatrixXd geometry_fim(const Eigen::MatrixXd& j_eta,
                             const Eigen::MatrixXd& jacobian);

/// Rows/columns of j at the given indices.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& j, const std::vector<int>& idx);

/// Equivalent FIM for the listed parameters after eliminating the rest by
/// Schur complement. Throws SingularMatrixError (with the estimated
/// condition number) when the nuisance block is numerically singular.
Eigen::MatrixXd efim(const Eigen::MatrixXd& j, const std::vector<int>& interest,
                     double condition_threshold = kConditionThreshold);

/// Symmetric-PSD inverse with a condition guard; no silent regularization.
Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& j, const std::string& what,
                                double condition_threshold = kConditionThreshold);

/// sqrt(trace(j_efim^-1)) over the full (position-only) EFIM.
double peb(const Eigen::MatrixXd& position_efim);

/// [J^-1]_{u,u}.
double crb_entry(const Eigen::MatrixXd& j, int u);

/// Scale-invariant condition estimate: eigenvalue ratio after Jacobi
/// equilibration, so mixed parameter units do not masquerade as rank
/// deficiency; infinity when singular.
double condition_number(const Eigen::MatrixXd& j);

struct FimBundle {
  Eigen::MatrixXd path_fim;       // 4L x 4L
  Eigen::MatrixXd jacobian;       // 4L x 2(S+L+1)
  Eigen::MatrixXd geometry_fim;   // 2(S+L+1) square
  Eigen::MatrixXd position_efim;  // 2(S+1) square
  PathParamIndex eta{0};
  PositionParamIndex xi{0};
};

FimBundle compute_fim_bundle(const Scenario& s, const DmaConfiguration& cfg);

struct BoundReport {
  double peb_m = 0.0;
  std::vector<double> crb_position_m2;  // per position coordinate
  std::vector<double> crb_delay_s2;     // per path, path-domain
  std::vector<double> crb_aoa_rad2;     // per path, path-domain
  double condition_path_fim = 0.0;
  double condition_position_efim = 0.0;
  std::uint64_t scenario_hash = 0;

  std::string to_text() const;
};

/// Full pipeline: paths -> manifolds -> FIM -> EFIM -> bounds.
BoundReport evaluate_bounds(const Scenario& s, const DmaConfiguration& cfg);

}  // namespace dmasense
