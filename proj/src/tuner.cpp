#include "dmasense/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dmasense/dma_frontend.hpp"

namespace dmasense {

namespace {

double wrap_half_pi(double psi) {
  // reduce mod pi into (-pi/2, pi/2); adding pi leaves the matched-gain
  // objective unchanged (both cosine factors flip sign)
  psi = std::fmod(psi, kPi);
  if (psi > 0.5 * kPi) psi -= kPi;
  if (psi <= -0.5 * kPi) psi += kPi;
  return psi;
}

double resonance_for_phase(const Scenario& s, double psi) {
  // invert Psi = atan(2*pi*(f_r^2 - f^2)/(Gamma*f)) at the carrier
  const double f = s.waveform.carrier_hz;
  const double arg =
      f * f + s.hardware.damping_rad_hz * f * std::tan(psi) / kTwoPi;
  const double f_r = std::sqrt(std::max(arg, 0.0));
  return std::clamp(f_r, s.hardware.f_r_min_hz, s.hardware.f_r_max_hz);
}

struct ElementPhase {
  double target;     // zeta_n: phase that conj(w_n) a_n must cancel
  double amplitude;  // waveguide attenuation at the element
};

std::vector<ElementPhase> element_phases(const Scenario& s, double phi) {
  const DmaHardware& hw = s.hardware;
  const WaveguideModel wg = WaveguideModel::from_hardware(hw);
  const double f_c = s.waveform.carrier_hz;
  const double beta = wg.phase_const(f_c);
  const double steer = kTwoPi * f_c * hw.element_spacing_m * std::sin(phi) / kSpeedOfLight;
  std::vector<ElementPhase> out(hw.elements());
  for (int n = 0; n < hw.elements(); ++n) {
    const double ell = hw.feed_distance_m(n);
    out[n].target = steer * n + beta * ell + 0.5 * kPi;
    out[n].amplitude =
        std::abs(hw.element_coupling_at(n)) * std::exp(-wg.attenuation_np_m * ell);
  }
  return out;
}

}  // namespace

std::vector<double> matched_configuration(const Scenario& s, int path) {
  const PathSet paths = make_paths(s);
  const DmaHardware& hw = s.hardware;
  const std::vector<ElementPhase> ep = element_phases(s, paths.aoa_rad[path]);

  const double f_c = s.waveform.carrier_hz;
  const double psi_lo = lorentzian_phase(f_c, hw.f_r_min_hz, hw.damping_rad_hz);
  const double psi_hi = lorentzian_phase(f_c, hw.f_r_max_hz, hw.damping_rad_hz);

  constexpr int kGrid = 33;
  constexpr int kPasses = 3;
  constexpr int kStarts = 8;  // common-phase offsets, one basin each

  // Per strip: half-angle rule toward a common target phase, clipped to the
  // attainable window, then per-element 1-D refinement of the normalized
  // strip gain. The amplitude-phase coupling makes the normalized objective
  // multi-modal in the common phase, hence the deterministic multi-start.
  std::vector<double> psi(hw.elements());
  for (int m = 0; m < hw.rf_chains; ++m) {
    const int first = m * hw.elements_per_strip;
    const int count = hw.elements_per_strip;
    std::vector<double> best_strip(count);
    double best_val = -1.0;
    for (int start = 0; start < kStarts; ++start) {
      const double delta = kTwoPi * start / kStarts;
      std::vector<double> cur(count);
      for (int i = 0; i < count; ++i)
        cur[i] = std::clamp(wrap_half_pi(0.5 * (ep[first + i].target - delta)),
                            psi_lo, psi_hi);
      // coordinate refinement; cur is indexed strip-locally, so wrap the
      // evaluation in a local view
      auto value = [&](int skip = -1, double skip_psi = 0.0) {
        cplx num{0.0, 0.0};
        double den = 0.0;
        for (int i = 0; i < count; ++i) {
          const double p = (i == skip) ? skip_psi : cur[i];
          const double a = ep[first + i].amplitude * std::cos(p);
          num += a * std::polar(1.0, ep[first + i].target - p);
          den += a * a;
        }
        return den > 0.0 ? std::norm(num) / den : 0.0;
      };
      for (int pass = 0; pass < kPasses; ++pass) {
        for (int i = 0; i < count; ++i) {
          double best_psi = cur[i];
          double best = value();
          for (int g = 0; g < kGrid; ++g) {
            const double cand = psi_lo + (psi_hi - psi_lo) * g / (kGrid - 1);
            const double val = value(i, cand);
            if (val > best) {
              best = val;
              best_psi = cand;
            }
          }
          cur[i] = best_psi;
        }
      }
      const double val = value();
      if (val > best_val) {
        best_val = val;
        best_strip = cur;
      }
    }
    for (int i = 0; i < count; ++i) psi[first + i] = best_strip[i];
  }

  std::vector<double> f_r(hw.elements());
  for (int n = 0; n < hw.elements(); ++n) f_r[n] = resonance_for_phase(s, psi[n]);
  return f_r;
}

std::vector<double> matched_table(const Scenario& s) {
  const int n_elems = s.hardware.elements();
  std::vector<double> table(static_cast<std::size_t>(s.configurations) * n_elems);
  for (int j = 0; j < s.configurations; ++j) {
    const std::vector<double> state = matched_configuration(s, j % s.paths());
    std::copy(state.begin(), state.end(), table.begin() + j * n_elems);
  }
  return table;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Candidate i draws from a stream derived from (seed, i) only, so the
/// candidate set is identical across sweep points of the same hardware.
std::vector<double> random_table(const Scenario& s, std::uint64_t seed, int index) {
  const std::size_t size =
      static_cast<std::size_t>(s.configurations) * s.hardware.elements();
  std::vector<double> table(size);
  std::uint64_t state = splitmix64(seed ^ (0x51ED2701ULL + static_cast<std::uint64_t>(index)));
  const double lo = s.hardware.f_r_min_hz;
  const double span = s.hardware.f_r_max_hz - s.hardware.f_r_min_hz;
  for (double& v : table) {
    state = splitmix64(state);
    v = lo + span * unit_double(state);
  }
  return table;
}

double objective_value(const Scenario& s, const std::vector<double>& table,
                       TuneObjective objective) {
  try {
    const DmaConfiguration cfg = build_configuration(s, table);
    const FimBundle bundle = compute_fim_bundle(s, cfg);
    switch (objective) {
      case TuneObjective::peb:
        return peb(bundle.position_efim);
      case TuneObjective::delay_crb:
        return crb_entry(bundle.path_fim, bundle.eta.tau(0));
      case TuneObjective::aoa_crb:
        return crb_entry(bundle.path_fim, bundle.eta.phi(0));
    }
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TuneResult optimize_peb(const Scenario& s, const TunerSettings& settings) {
  if (settings.budget < 1) throw ValidationError("tuner budget must be >= 1");

  const std::vector<double> seed_table = matched_table(s);
  auto candidate = [&](int i) {
    return i == 0 ? seed_table : random_table(s, settings.seed, i);
  };

  TuneResult best;
  best.objective = std::numeric_limits<double>::infinity();

  if (settings.method == TuneMethod::random_search) {
    std::vector<double> objectives(settings.budget);
    const int threads = std::max(1, settings.threads);
    if (threads == 1) {
      for (int i = 0; i < settings.budget; ++i)
        objectives[i] = objective_value(s, candidate(i), settings.objective);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
          for (int i = t; i < settings.budget; i += threads)
            objectives[i] = objective_value(s, candidate(i), settings.objective);
        });
      }
      for (auto& th : pool) th.join();
    }
    int best_index = -1;
    for (int i = 0; i < settings.budget; ++i) {
      if (objectives[i] < best.objective) {
        best.objective = objectives[i];
        best_index = i;
      }
    }
    best.evaluations = settings.budget;
    if (best_index < 0)
      throw SingularMatrixError("no feasible configuration within budget");
    best.f_r_table = candidate(best_index);
    return best;
  }

  // coordinate descent: deterministic per-entry line search from the matched seed
  std::vector<double> current = seed_table;
  best.objective = objective_value(s, current, settings.objective);
  best.evaluations = 1;
  const double lo = s.hardware.f_r_min_hz;
  const double span = s.hardware.f_r_max_hz - lo;
  constexpr int kLineGrid = 6;
  bool done = best.evaluations >= settings.budget;
  while (!done) {
    for (std::size_t idx = 0; idx < current.size() && !done; ++idx) {
      for (int g = 0; g < kLineGrid && !done; ++g) {
        const double saved = current[idx];
        current[idx] = lo + span * (g + 0.5) / kLineGrid;
        const double obj = objective_value(s, current, settings.objective);
        ++best.evaluations;
        if (obj < best.objective) {
          best.objective = obj;
        } else {
          current[idx] = saved;
        }
        done = best.evaluations >= settings.budget;
      }
    }
  }
  if (!std::isfinite(best.objective))
    throw SingularMatrixError("no feasible configuration within budget");
  best.f_r_table = std::move(current);
  return best;
}

}  // namespace dmasense
