#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmasense/dma_frontend.hpp"
#include "dmasense/geometry.hpp"

namespace dmasense {

/// Unit-norm ULA steering vector; element n carries phase
/// 2*pi*f*(n-1)*d_x*sin(phi)/c.
std::vector<cplx> steering_vector(double f_hz, double phi_rad, int n_elems,
                                  double spacing_m);

/// g = W^H a. The combiner's disjoint column supports reduce each entry to
/// one per-strip dot product.
std::vector<cplx> effective_manifold(const Combiner& w, std::span<const cplx> a);

/// Effective manifolds for every (state, subcarrier, path), plus the
/// aperture-weighted companion W^H diag(x) a used by the AoA derivative.
struct ManifoldTensor {
  int states = 0, subcarriers = 0, paths = 0, chains = 0;
  std::vector<cplx> g;
  std::vector<cplx> g_aperture;

  std::size_t offset(int j, int k, int l) const {
    return (((static_cast<std::size_t>(j) * subcarriers) + k) * paths + l) * chains;
  }
  std::span<const cplx> g_at(int j, int k, int l) const {
    return {g.data() + offset(j, k, l), static_cast<std::size_t>(chains)};
  }
  std::span<const cplx> g_aperture_at(int j, int k, int l) const {
    return {g_aperture.data() + offset(j, k, l), static_cast<std::size_t>(chains)};
  }
};

ManifoldTensor build_manifolds(const Scenario& s, const PathSet& paths,
                               const DmaConfiguration& cfg);

/// Noise-free observation mean mu_{j,k} = sqrt(P) * sum_l gamma_l *
/// exp(-j*2*pi*f_k*tau_l) * g_{j,l}[k].
std::vector<cplx> mean_observation(const Scenario& s, const PathSet& paths,
                                   const ManifoldTensor& manifolds, int j, int k);

/// Stacked index of entry m of y_j[k]; j-major, then subcarrier, then chain.
inline std::size_t stack_index(int subcarriers, int chains, int j, int k, int m) {
  return (static_cast<std::size_t>(j) * subcarriers + k) * chains + m;
}

/// Synthetic noisy observation: stacked means plus i.i.d. circularly
/// symmetric complex Gaussian noise with per-entry variance sigma^2.
/// Deterministic for a fixed seed.
std::vector<cplx> simulate_observations(const Scenario& s, const PathSet& paths,
                                        const DmaConfiguration& cfg,
                                        std::uint64_t seed);

/// Debug dump of the manifold and mean magnitudes: per-manifold rows
/// "g,j,k,l,m,abs" followed by per-mean rows "mu,j,k,m,abs".
void dump_signal_magnitudes_csv(const Scenario& s, const PathSet& paths,
                                const ManifoldTensor& manifolds,
                                std::ostream& out);

}  // namespace dmasense
