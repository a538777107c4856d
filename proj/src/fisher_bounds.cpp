#include "dmasense/fisher_bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dmasense {

Eigen::MatrixXcd mean_derivatives(const Scenario& s, const PathSet& paths,
                                  const ManifoldTensor& manifolds, int j, int k) {
  const int L = manifolds.paths;
  const PathParamIndex eta{L};
  Eigen::MatrixXcd d(manifolds.chains, eta.size());
  const double sqrt_p = std::sqrt(s.waveform.tx_power_w);
  const double f_k = s.waveform.subcarrier_hz(k);
  const double omega_k = kTwoPi * f_k;
  for (int l = 0; l < L; ++l) {
    const cplx pref = sqrt_p * std::polar(1.0, -omega_k * paths.delay_s[l]);
    const cplx gpref = pref * paths.gain[l];
    const cplx dtau = gpref * cplx{0.0, -omega_k};
    const cplx dphi =
        gpref * cplx{0.0, omega_k * std::cos(paths.aoa_rad[l]) / kSpeedOfLight};
    const auto g = manifolds.g_at(j, k, l);
    const auto ga = manifolds.g_aperture_at(j, k, l);
    for (int m = 0; m < manifolds.chains; ++m) {
      d(m, eta.tau(l)) = dtau * g[m];
      d(m, eta.phi(l)) = dphi * ga[m];
      d(m, eta.gamma_re(l)) = pref * g[m];
      d(m, eta.gamma_im(l)) = pref * cplx{0.0, 1.0} * g[m];
    }
  }
  return d;
}

namespace {

void accumulate_state(const Scenario& s, const PathSet& paths,
                      const ManifoldTensor& manifolds, int j,
                      Eigen::MatrixXd& acc) {
  for (int k = 0; k < manifolds.subcarriers; ++k) {
    const Eigen::MatrixXcd d = mean_derivatives(s, paths, manifolds, j, k);
    acc.noalias() += (d.adjoint() * d).real();
  }
}

}  // namespace

Eigen::MatrixXd path_fim(const Scenario& s, const PathSet& paths,
                         const ManifoldTensor& manifolds) {
  const int n = 4 * manifolds.paths;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < manifolds.states; ++j)
    accumulate_state(s, paths, manifolds, j, acc);
  return (2.0 / s.waveform.noise_power_w) * acc;
}

std::vector<Eigen::MatrixXd> path_fim_per_state(const Scenario& s,
                                                const PathSet& paths,
                                                const ManifoldTensor& manifolds) {
  const int n = 4 * manifolds.paths;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(manifolds.states);
  for (int j = 0; j < manifolds.states; ++j) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    accumulate_state(s, paths, manifolds, j, acc);
    out.push_back((2.0 / s.waveform.noise_power_w) * acc);
  }
  return out;
}

Eigen::MatrixXd geometry_fim(const Eigen::MatrixXd& j_eta,
                             const Eigen::MatrixXd& jacobian) {
  if (j_eta.rows() != jacobian.rows())
    throw ValidationError("jacobian rows do not match path FIM size");
  return jacobian.transpose() * j_eta * jacobian;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& j, const std::vector<int>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = j(idx[r], idx[c]);
  return out;
}

namespace {

// The FIMs here are tiny but brutally scaled: parameter units differ by tens
// of orders of magnitude, and nuisance elimination cancels all but ~1e-4 of
// the raw information (the weighted-mean-frequency part). Solves therefore
// run in extended precision on a Jacobi-equilibrated copy; the condition
// guard sees the equilibrated matrix, so unit choices cannot masquerade as
// rank deficiency while genuinely dead parameters still trip it.

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

LongVector equilibration(const LongMatrix& j) {
  LongVector d(j.rows());
  for (int i = 0; i < j.rows(); ++i)
    d(i) = j(i, i) > 0.0L ? 1.0L / std::sqrt(j(i, i)) : 1.0L;
  return d;
}

double scaled_condition(const LongMatrix& scaled) {
  if (scaled.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<LongMatrix> es(scaled, Eigen::EigenvaluesOnly);
  const LongVector ev = es.eigenvalues().cwiseAbs();
  const long double lo = ev.minCoeff();
  if (lo <= 0.0L) return std::numeric_limits<double>::infinity();
  return static_cast<double>(ev.maxCoeff() / lo);
}

/// Extended-precision LDLT solve with an explicit condition guard; `what`
/// names the matrix in the error message. The solve runs on the raw matrix
/// (its accuracy already tracks the equilibrated condition, and square-root
/// free LDLT keeps power-of-two rescalings of j bitwise covariant); only
/// the guard looks at the equilibrated copy.
Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& j, const Eigen::MatrixXd& rhs,
                              const std::string& what, double threshold) {
  const LongMatrix jl = j.cast<long double>();
  const LongVector d = equilibration(jl);
  const double cond = scaled_condition(d.asDiagonal() * jl * d.asDiagonal());
  if (!(cond < threshold)) {
    std::ostringstream msg;
    msg << what << " is singular or near-singular (condition number " << cond
        << " exceeds " << threshold << ")";
    throw SingularMatrixError(msg.str(), cond);
  }
  const LongMatrix solved =
      Eigen::LDLT<LongMatrix>(jl).solve(rhs.cast<long double>());
  return solved.cast<double>();
}

}  // namespace

double condition_number(const Eigen::MatrixXd& j) {
  const LongMatrix jl = j.cast<long double>();
  const LongVector d = equilibration(jl);
  return scaled_condition(d.asDiagonal() * jl * d.asDiagonal());
}

Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& j, const std::string& what,
                                double condition_threshold) {
  return guarded_solve(j, Eigen::MatrixXd::Identity(j.rows(), j.cols()), what,
                       condition_threshold);
}

Eigen::MatrixXd efim(const Eigen::MatrixXd& j, const std::vector<int>& interest,
                     double condition_threshold) {
  std::vector<char> is_interest(j.rows(), 0);
  for (int u : interest) is_interest[u] = 1;
  std::vector<int> nuisance;
  for (int u = 0; u < j.rows(); ++u)
    if (!is_interest[u]) nuisance.push_back(u);

  const Eigen::MatrixXd j_ii = submatrix(j, interest);
  if (nuisance.empty()) return j_ii;

  Eigen::MatrixXd j_in(interest.size(), nuisance.size());
  for (std::size_t r = 0; r < interest.size(); ++r)
    for (std::size_t c = 0; c < nuisance.size(); ++c)
      j_in(r, c) = j(interest[r], nuisance[c]);
  const Eigen::MatrixXd j_nn = submatrix(j, nuisance);

  const Eigen::MatrixXd solved =
      guarded_solve(j_nn, j_in.transpose(), "nuisance FIM block", condition_threshold);
  Eigen::MatrixXd e = j_ii - j_in * solved;
  return 0.5 * (e + e.transpose());  // restore exact symmetry
}

double peb(const Eigen::MatrixXd& position_efim) {
  const Eigen::MatrixXd inv =
      guarded_inverse(position_efim, "position EFIM (unlocalizable configuration)");
  return std::sqrt(inv.trace());
}

double crb_entry(const Eigen::MatrixXd& j, int u) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(j.rows());
  e(u) = 1.0;
  const Eigen::MatrixXd col = guarded_solve(j, e, "FIM", kConditionThreshold);
  return col(u, 0);
}

FimBundle compute_fim_bundle(const Scenario& s, const DmaConfiguration& cfg) {
  FimBundle b;
  const PathSet paths = make_paths(s);
  const ManifoldTensor manifolds = build_manifolds(s, paths, cfg);
  b.eta = PathParamIndex{paths.paths()};
  b.xi = PositionParamIndex{s.geometry.scatterers()};
  b.path_fim = path_fim(s, paths, manifolds);
  b.jacobian = geometry_jacobian(s, paths);
  b.geometry_fim = geometry_fim(b.path_fim, b.jacobian);
  std::vector<int> interest(b.xi.position_size());
  for (int i = 0; i < b.xi.position_size(); ++i) interest[i] = i;
  b.position_efim = efim(b.geometry_fim, interest);
  return b;
}

BoundReport evaluate_bounds(const Scenario& s, const DmaConfiguration& cfg) {
  const FimBundle b = compute_fim_bundle(s, cfg);
  BoundReport r;
  r.scenario_hash = s.hash();
  r.condition_path_fim = condition_number(b.path_fim);
  r.condition_position_efim = condition_number(b.position_efim);
  r.peb_m = peb(b.position_efim);

  const Eigen::MatrixXd efim_inv =
      guarded_inverse(b.position_efim, "position EFIM (unlocalizable configuration)");
  r.crb_position_m2.resize(b.xi.position_size());
  for (int i = 0; i < b.xi.position_size(); ++i) r.crb_position_m2[i] = efim_inv(i, i);

  const Eigen::MatrixXd path_inv = guarded_inverse(b.path_fim, "path-domain FIM");
  r.crb_delay_s2.resize(b.eta.paths);
  r.crb_aoa_rad2.resize(b.eta.paths);
  for (int l = 0; l < b.eta.paths; ++l) {
    r.crb_delay_s2[l] = path_inv(b.eta.tau(l), b.eta.tau(l));
    r.crb_aoa_rad2[l] = path_inv(b.eta.phi(l), b.eta.phi(l));
  }
  return r;
}

std::string BoundReport::to_text() const {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(scenario_hash));
  out << "scenario_hash = " << hash << "\n";
  out << "peb_m = " << fmt(peb_m) << "\n";
  for (std::size_t i = 0; i < crb_position_m2.size(); ++i)
    out << "crb_position_m2[" << i << "] = " << fmt(crb_position_m2[i]) << "\n";
  for (std::size_t l = 0; l < crb_delay_s2.size(); ++l)
    out << "crb_delay_s2[" << l << "] = " << fmt(crb_delay_s2[l]) << "\n";
  for (std::size_t l = 0; l < crb_aoa_rad2.size(); ++l)
    out << "crb_aoa_rad2[" << l << "] = " << fmt(crb_aoa_rad2[l]) << "\n";
  out << "condition_path_fim = " << fmt(condition_path_fim) << "\n";
  out << "condition_position_efim = " << fmt(condition_position_efim) << "\n";
  return out.str();
}

}  // namespace dmasense
