#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dmasense/signal_model.hpp"
#include "dmasense/tuner.hpp"

using namespace dmasense;

namespace {

Scenario fast_scenario() {
  Scenario s = default_scenario();
  s.configurations = 2;
  s.waveform.subcarriers = 16;
  s.waveform.spacing_hz = 500e6 / 16.0;
  return s;
}

/// Normalized carrier gain ||g[k_c]|| of one state built from an f_r table.
double carrier_gain(const Scenario& s, const std::vector<double>& f_r_state) {
  const DmaHardware& hw = s.hardware;
  const WaveguideModel wg = WaveguideModel::from_hardware(hw);
  const Combiner w = build_combiner(hw, wg, f_r_state, s.waveform.carrier_hz);
  const PathSet paths = make_paths(s);
  const auto a = steering_vector(s.waveform.carrier_hz, paths.aoa_rad[0],
                                 hw.elements(), hw.element_spacing_m);
  const auto g = effective_manifold(w, a);
  double nrm = 0.0;
  for (const cplx& v : g) nrm += std::norm(v);
  return std::sqrt(nrm);
}

}  // namespace

TEST_CASE("matched tables respect the tuning constraint and are deterministic") {
  const Scenario s = default_scenario();
  const std::vector<double> a = matched_table(s);
  const std::vector<double> b = matched_table(s);
  CHECK(a == b);  // bitwise
  for (double f_r : a) {
    CHECK(f_r >= s.hardware.f_r_min_hz);
    CHECK(f_r <= s.hardware.f_r_max_hz);
  }
  // states matched to the same path are identical
  const std::vector<double> p0 = matched_configuration(s, 0);
  const std::vector<double> p0_again = matched_configuration(s, 0);
  CHECK(p0 == p0_again);
}

TEST_CASE("degenerate tuning range returns the single feasible table") {
  Scenario s = fast_scenario();
  s.hardware.f_r_min_hz = s.hardware.f_r_max_hz = 20e9;  // B_tune = 0
  const std::vector<double> t = matched_configuration(s, 0);
  for (double f_r : t) CHECK(f_r == 20e9);
}

TEST_CASE("matched gain reaches the per-element grid-search optimum within 1%") {
  // single microstrip, no leakage, effectively unconstrained tuning
  Scenario s = default_scenario();
  s.configurations = 1;
  s.hardware.rf_chains = 1;
  s.hardware.elements_per_strip = 8;
  s.hardware.leakage_fraction = 0.0;
  s.hardware.f_r_min_hz = 10e9;
  s.hardware.f_r_max_hz = 40e9;
  s.geometry.sps.clear();
  s.geometry.reflections.clear();

  const std::vector<double> matched = matched_configuration(s, 0);
  const double matched_gain = carrier_gain(s, matched);

  // oracle: coordinate ascent with a fine grid per element on the same
  // objective, started from mid-band
  const int n = s.hardware.elements();
  std::vector<double> oracle(n, 20e9);
  const double lo = s.hardware.f_r_min_hz, hi = s.hardware.f_r_max_hz;
  for (int pass = 0; pass < 4; ++pass) {
    for (int i = 0; i < n; ++i) {
      double best_v = oracle[i];
      double best_g = carrier_gain(s, oracle);
      for (int g = 0; g < 721; ++g) {
        std::vector<double> cand = oracle;
        cand[i] = lo + (hi - lo) * g / 720.0;
        const double val = carrier_gain(s, cand);
        if (val > best_g) {
          best_g = val;
          best_v = cand[i];
        }
      }
      oracle[i] = best_v;
    }
  }
  const double oracle_gain = carrier_gain(s, oracle);
  CHECK(matched_gain >= 0.99 * oracle_gain);
  CHECK(matched_gain <= 1.0 + 1e-12);
}

TEST_CASE("budget 1 returns the matched seed") {
  const Scenario s = fast_scenario();
  TunerSettings settings;
  settings.budget = 1;
  settings.seed = 77;
  const TuneResult r = optimize_peb(s, settings);
  CHECK(r.f_r_table == matched_table(s));
  CHECK(r.evaluations == 1);
  CHECK(std::isfinite(r.objective));
}

TEST_CASE("larger budgets never hurt and optimization beats the baselines") {
  const Scenario s = fast_scenario();
  TunerSettings small;
  small.budget = 10;
  small.seed = 5;
  TunerSettings large = small;
  large.budget = 60;
  const TuneResult r_small = optimize_peb(s, small);
  const TuneResult r_large = optimize_peb(s, large);
  CHECK(r_large.objective <= r_small.objective);

  // never worse than matched combining (it seeds the search)
  const double matched_peb =
      peb(compute_fim_bundle(s, build_configuration(s, matched_table(s)))
              .position_efim);
  CHECK(r_small.objective <= matched_peb);

  // beats an untuned uniform-resonance table
  const std::vector<double> uniform(
      static_cast<std::size_t>(s.configurations) * s.hardware.elements(),
      s.waveform.carrier_hz);
  const double uniform_peb =
      peb(compute_fim_bundle(s, build_configuration(s, uniform)).position_efim);
  CHECK(r_large.objective < uniform_peb);

  for (double f_r : r_large.f_r_table) {
    CHECK(f_r >= s.hardware.f_r_min_hz);
    CHECK(f_r <= s.hardware.f_r_max_hz);
  }
}

TEST_CASE("search is deterministic, also across thread counts") {
  const Scenario s = fast_scenario();
  TunerSettings settings;
  settings.budget = 24;
  settings.seed = 31;
  const TuneResult a = optimize_peb(s, settings);
  const TuneResult b = optimize_peb(s, settings);
  CHECK(a.f_r_table == b.f_r_table);
  CHECK(a.objective == b.objective);

  settings.threads = 2;
  const TuneResult c = optimize_peb(s, settings);
  CHECK(a.f_r_table == c.f_r_table);
  CHECK(a.objective == c.objective);
}

TEST_CASE("alternative objectives and coordinate descent") {
  const Scenario s = fast_scenario();
  TunerSettings settings;
  settings.budget = 12;
  settings.seed = 9;

  settings.objective = TuneObjective::delay_crb;
  const TuneResult delay = optimize_peb(s, settings);
  CHECK(delay.objective > 0.0);

  settings.objective = TuneObjective::aoa_crb;
  const TuneResult aoa = optimize_peb(s, settings);
  CHECK(aoa.objective > 0.0);

  settings.objective = TuneObjective::peb;
  settings.method = TuneMethod::coordinate_descent;
  const TuneResult cd = optimize_peb(s, settings);
  CHECK(cd.evaluations == settings.budget);
  const double matched_peb =
      peb(compute_fim_bundle(s, build_configuration(s, matched_table(s)))
              .position_efim);
  CHECK(cd.objective <= matched_peb);

  settings.budget = 0;
  CHECK_THROWS_AS(optimize_peb(s, settings), ValidationError);
}

TEST_CASE("unlocalizable scenarios are reported") {
  Scenario s = fast_scenario();
  // dead reflectors leave the scatterer positions unidentifiable
  s.geometry.reflections = {cplx{0.0, 0.0}};
  s.geometry.sps = {{5.0, 3.0}};
  TunerSettings settings;
  settings.budget = 3;
  CHECK_THROWS_AS(optimize_peb(s, settings), SingularMatrixError);
}
