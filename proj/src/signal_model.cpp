#include "dmasense/signal_model.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "dmasense/kernels.hpp"

namespace dmasense {

std::vector<cplx> steering_vector(double f_hz, double phi_rad, int n_elems,
                                  double spacing_m) {
  std::vector<cplx> a(n_elems);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_elems));
  const double step = kTwoPi * f_hz * spacing_m * std::sin(phi_rad) / kSpeedOfLight;
  for (int n = 0; n < n_elems; ++n) a[n] = std::polar(scale, n * step);
  return a;
}

std::vector<cplx> effective_manifold(const Combiner& w, std::span<const cplx> a) {
  if (static_cast<int>(a.size()) != w.elements())
    throw ValidationError("steering vector length does not match combiner rows");
  std::vector<cplx> g(w.chains);
  for (int m = 0; m < w.chains; ++m) {
    g[m] = kernels::active().cdotc(w.column(m), a.data() + m * w.per_strip,
                                   w.per_strip);
  }
  return g;
}

ManifoldTensor build_manifolds(const Scenario& s, const PathSet& paths,
                               const DmaConfiguration& cfg) {
  ManifoldTensor t;
  t.states = cfg.states;
  t.subcarriers = cfg.subcarriers;
  t.paths = paths.paths();
  t.chains = s.hardware.rf_chains;
  const std::size_t total = static_cast<std::size_t>(t.states) * t.subcarriers *
                            t.paths * t.chains;
  t.g.resize(total);
  t.g_aperture.resize(total);

  const int n_elems = s.hardware.elements();
  const double d_x = s.hardware.element_spacing_m;
  std::vector<cplx> weighted(n_elems);
  for (int k = 0; k < t.subcarriers; ++k) {
    const double f_k = s.waveform.subcarrier_hz(k);
    for (int l = 0; l < t.paths; ++l) {
      const std::vector<cplx> a =
          steering_vector(f_k, paths.aoa_rad[l], n_elems, d_x);
      for (int n = 0; n < n_elems; ++n) weighted[n] = (n * d_x) * a[n];
      for (int j = 0; j < t.states; ++j) {
        const Combiner& w = cfg.at(j, k);
        cplx* g = t.g.data() + t.offset(j, k, l);
        cplx* ga = t.g_aperture.data() + t.offset(j, k, l);
        for (int m = 0; m < w.chains; ++m) {
          const cplx* col = w.column(m);
          g[m] = kernels::active().cdotc(col, a.data() + m * w.per_strip,
                                         w.per_strip);
          ga[m] = kernels::active().cdotc(col, weighted.data() + m * w.per_strip,
                                          w.per_strip);
        }
      }
    }
  }
  return t;
}

std::vector<cplx> mean_observation(const Scenario& s, const PathSet& paths,
                                   const ManifoldTensor& manifolds, int j, int k) {
  std::vector<cplx> mu(manifolds.chains, cplx{0.0, 0.0});
  const double sqrt_p = std::sqrt(s.waveform.tx_power_w);
  const double f_k = s.waveform.subcarrier_hz(k);
  for (int l = 0; l < manifolds.paths; ++l) {
    const cplx coeff =
        sqrt_p * paths.gain[l] * std::polar(1.0, -kTwoPi * f_k * paths.delay_s[l]);
    const auto g = manifolds.g_at(j, k, l);
    for (int m = 0; m < manifolds.chains; ++m) mu[m] += coeff * g[m];
  }
  return mu;
}

std::vector<cplx> simulate_observations(const Scenario& s, const PathSet& paths,
                                        const DmaConfiguration& cfg,
                                        std::uint64_t seed) {
  const ManifoldTensor manifolds = build_manifolds(s, paths, cfg);
  const int J = cfg.states, K = cfg.subcarriers, M = manifolds.chains;
  std::vector<cplx> y(static_cast<std::size_t>(J) * K * M);

  std::mt19937_64 rng(seed);
  // Box-Muller, explicit so draws are reproducible across standard libraries.
  const double sigma_axis = std::sqrt(s.waveform.noise_power_w / 2.0);
  auto gauss_pair = [&rng]() {
    const double u1 =
        (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    const double u2 = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return cplx{r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  };

  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) {
      const std::vector<cplx> mu = mean_observation(s, paths, manifolds, j, k);
      for (int m = 0; m < M; ++m) {
        y[stack_index(K, M, j, k, m)] = mu[m] + sigma_axis * gauss_pair();
      }
    }
  }
  return y;
}

void dump_signal_magnitudes_csv(const Scenario& s, const PathSet& paths,
                                const ManifoldTensor& manifolds,
                                std::ostream& out) {
  auto full = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "kind,j,k,l,m,abs\n";
  for (int j = 0; j < manifolds.states; ++j) {
    for (int k = 0; k < manifolds.subcarriers; ++k) {
      for (int l = 0; l < manifolds.paths; ++l) {
        const auto g = manifolds.g_at(j, k, l);
        for (int m = 0; m < manifolds.chains; ++m)
          out << "g," << j << "," << k << "," << l << "," << m << ","
              << full(std::abs(g[m])) << "\n";
      }
      const std::vector<cplx> mu = mean_observation(s, paths, manifolds, j, k);
      for (int m = 0; m < manifolds.chains; ++m)
        out << "mu," << j << "," << k << ",," << m << "," << full(std::abs(mu[m]))
            << "\n";
    }
  }
}

}  // namespace dmasense
