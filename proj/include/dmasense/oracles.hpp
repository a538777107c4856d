#pragma once

#include <Eigen/Dense>

#include "dmasense/fisher_bounds.hpp"

namespace dmasense {

/// Central finite-difference references. These differentiate the forward
/// model (path_delays / path_aoas / mean_observation) numerically and never
/// touch the analytic derivative code they are used to check.

struct FdSteps {
  double tau_s = 2e-14;
  double phi_rad = 1e-6;
  double gain = 1e-6;
  double position_m = 1e-4;
};

/// Numeric counterpart of geometry_jacobian. Gain rows are structural
/// (identity) and copied as such; delay and AoA rows come from central
/// differences of the forward geometry functions.
Eigen::MatrixXd numeric_geometry_jacobian(const Scenario& s,
                                          double step_m = 1e-4);

/// Numeric counterpart of path_fim built from central differences of the
/// stacked observation means with respect to each path-domain parameter.
Eigen::MatrixXd numeric_path_fim(const Scenario& s, const DmaConfiguration& cfg,
                                 const FdSteps& steps = {});

}  // namespace dmasense
