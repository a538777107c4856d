#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dmasense/dma_frontend.hpp"

using namespace dmasense;

namespace {
const double kGamma = kTwoPi * 20e9 / 100.0;  // Q_c = 100 at 20 GHz
}

TEST_CASE("raw polarizability on and off resonance") {
  // f = f_r: denominator is purely imaginary, value -j*Q(f)*F
  const cplx on = polarizability(20e9, 20e9, kGamma, 1.0);
  CHECK(on.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(on.imag() == doctest::Approx(-100.0).epsilon(1e-12));

  // coupling scales linearly
  const cplx scaled = polarizability(20e9, 20e9, kGamma, 2.5);
  CHECK(std::abs(scaled - 2.5 * on) < 1e-12 * std::abs(scaled));

  // f -> 0 kills the numerator
  CHECK(std::abs(polarizability(1e3, 20e9, kGamma, 1.0)) < 1e-12);
}

TEST_CASE("normalized polarizability limits") {
  CHECK(std::abs(normalized_polarizability(20e9, 20e9, kGamma) - cplx{0, -1}) < 1e-15);
  CHECK(std::abs(normalized_polarizability(20e9, 400e9, kGamma)) < 1e-3);
  // relates to the raw form through Q(f)*F
  const double f = 20.31e9, f_r = 19.9e9;
  const double q = kTwoPi * f / kGamma;
  const cplx raw = polarizability(f, f_r, kGamma, 0.7);
  const cplx norm = normalized_polarizability(f, f_r, kGamma);
  CHECK(std::abs(raw / (q * 0.7) - norm) < 1e-14);
}

TEST_CASE("lorentzian phase") {
  CHECK(lorentzian_phase(20e9, 20e9, kGamma) == 0.0);
  // invert the arctan argument to land exactly on pi/4
  const double f = 20e9;
  const double f_r = std::sqrt(f * f + kGamma * f / kTwoPi);
  CHECK(lorentzian_phase(f, f_r, kGamma) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(lorentzian_phase(f, 1e15, kGamma) == doctest::Approx(kPi / 2).epsilon(1e-6));
  // monotone in f_r, bounded by (-pi/2, pi/2)
  double prev = -kPi;
  for (double fr = 1e9; fr < 40e9; fr += 0.5e9) {
    const double psi = lorentzian_phase(f, fr, kGamma);
    CHECK(psi > prev);
    CHECK(psi > -kPi / 2);
    CHECK(psi < kPi / 2);
    prev = psi;
  }
}

TEST_CASE("amplitude-phase coupling identity over random tunings") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(10e9, 40e9);
  std::uniform_real_distribution<double> ratio(0.8, 1.25);
  for (int trial = 0; trial < 1000; ++trial) {
    const double f = u(rng), f_r = f * ratio(rng);
    const cplx resp = normalized_polarizability(f, f_r, kGamma);
    const double psi = lorentzian_phase(f, f_r, kGamma);
    CHECK(std::abs(resp) <= 1.0 + 1e-15);
    CHECK(std::abs(std::abs(resp) - std::cos(psi)) <= 1e-12 * std::cos(psi));
    const cplx form = -kImagUnit * std::cos(psi) * std::polar(1.0, psi);
    CHECK(std::abs(resp - form) <= 1e-12 * std::abs(resp));
  }
}

TEST_CASE("waveguide response") {
  const Scenario s = default_scenario();
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);

  // feed-adjacent element: unit factor
  CHECK(waveguide_response(wg, 20e9, 0, 0, s.hardware) == cplx{1.0, 0.0});
  CHECK(waveguide_response(wg, 20e9, 8, 1, s.hardware) == cplx{1.0, 0.0});

  // lossless: phase-only
  WaveguideModel lossless = wg;
  lossless.attenuation_np_m = 0.0;
  CHECK(std::abs(std::abs(waveguide_response(lossless, 20e9, 5, 0, s.hardware)) - 1.0) <
        1e-15);

  // Lambda = 0.8: power at the far end of a strip is 1 - Lambda.
  // The last element sits one spacing short of the strip end, so evaluate
  // the attenuation at the full strip length directly.
  const double l_ms = s.hardware.microstrip_length_m();
  const double end_power = std::exp(-2.0 * wg.attenuation_np_m * l_ms);
  CHECK(end_power == doctest::Approx(1.0 - 0.8).epsilon(1e-12));

  CHECK_THROWS_AS(waveguide_response(wg, 20e9, 0, 1, s.hardware), ValidationError);
}

TEST_CASE("combiner: trivial single element") {
  Scenario s = default_scenario();
  s.hardware.rf_chains = 1;
  s.hardware.elements_per_strip = 1;
  s.hardware.leakage_fraction = 0.0;
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);
  const double f_r = 20e9;
  const Combiner w = build_combiner(s.hardware, wg, std::span{&f_r, 1}, 20e9,
                                    /*normalize=*/false);
  CHECK(std::abs(w.entry(0, 0) - cplx{0, -1}) < 1e-15);
  const Combiner wn = build_combiner(s.hardware, wg, std::span{&f_r, 1}, 20e9);
  CHECK(std::abs(wn.entry(0, 0) - cplx{0, -1}) < 1e-15);
}

TEST_CASE("combiner: orthonormal columns and invariant zero pattern") {
  const Scenario s = default_scenario();
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(s.hardware.f_r_min_hz, s.hardware.f_r_max_hz);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> f_r(s.hardware.elements());
    for (auto& v : f_r) v = u(rng);
    const double f_k = 19.8e9 + 0.4e9 * trial / 10.0;
    const Combiner w = build_combiner(s.hardware, wg, f_r, f_k);

    double frob2 = 0.0;
    for (int a = 0; a < w.chains; ++a) {
      for (int b = 0; b < w.chains; ++b) {
        cplx dot{0, 0};
        for (int n = 0; n < w.elements(); ++n)
          dot += std::conj(w.entry(n, a)) * w.entry(n, b);
        const cplx expect = (a == b) ? cplx{1, 0} : cplx{0, 0};
        frob2 += std::norm(dot - expect);
      }
    }
    CHECK(std::sqrt(frob2) < 1e-10);  // W^H W = I

    for (int n = 0; n < w.elements(); ++n)
      for (int m = 0; m < w.chains; ++m)
        if (s.hardware.strip_of(n) != m) CHECK(w.entry(n, m) == cplx{0.0, 0.0});
  }
}

TEST_CASE("combiner: tuning-limit and degenerate-column errors") {
  const Scenario s = default_scenario();
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);
  std::vector<double> f_r(s.hardware.elements(), 20e9);
  f_r[3] = s.hardware.f_r_max_hz + 1.0;
  CHECK_THROWS_AS(build_combiner(s.hardware, wg, f_r, 20e9), ValidationError);

  // an all-zero column cannot be normalized
  Scenario z = s;
  z.hardware.element_coupling.assign(z.hardware.elements(), cplx{1.0, 0.0});
  for (int i = 0; i < 8; ++i) z.hardware.element_coupling[i] = 0.0;
  std::vector<double> ok(z.hardware.elements(), 20e9);
  CHECK_THROWS_AS(build_combiner(z.hardware, wg, ok, 20e9), ValidationError);
}

TEST_CASE("combiner entries move continuously with small detunings") {
  const Scenario s = default_scenario();
  const WaveguideModel wg = WaveguideModel::from_hardware(s.hardware);
  std::vector<double> f_r(s.hardware.elements(), 20.1e9);
  const Combiner a = build_combiner(s.hardware, wg, f_r, 20e9);
  for (auto& v : f_r) v += 1e3;  // 1 kHz nudge
  const Combiner b = build_combiner(s.hardware, wg, f_r, 20e9);
  for (int n = 0; n < a.elements(); ++n) {
    const int m = s.hardware.strip_of(n);
    CHECK(std::abs(a.entry(n, m) - b.entry(n, m)) < 1e-3 * std::abs(a.entry(n, m)));
  }
}

TEST_CASE("leakage efficiency") {
  WaveguideModel wg;
  wg.attenuation_np_m = 0.0;
  CHECK(leakage_efficiency(wg, 20e9, 32, 0.0075) == 1.0);
  wg.attenuation_np_m = 3.0;
  CHECK(leakage_efficiency(wg, 20e9, 1, 0.0075) == 1.0);

  // profile [1, 0.5]: |1.5|^2 / (2 * 1.25) = 0.9
  WaveguideModel half;
  const double spacing = 0.01;
  half.attenuation_np_m = -std::log(0.5) / spacing;
  CHECK(leakage_efficiency(half, 20e9, 2, spacing) == doctest::Approx(0.9).epsilon(1e-12));

  // non-increasing in the attenuation constant
  double prev = 1.0;
  for (double att = 0.0; att <= 50.0; att += 2.5) {
    WaveguideModel m;
    m.attenuation_np_m = att;
    const double a = leakage_efficiency(m, 20e9, 8, 0.0075);
    CHECK(a <= prev + 1e-15);
    CHECK(a > 0.0);
    CHECK(a <= 1.0);
    prev = a;
  }
}

TEST_CASE("combiner CSV dump round-trips the configuration") {
  Scenario s = default_scenario();
  s.waveform.subcarriers = 4;
  s.configurations = 2;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(s.hardware.f_r_min_hz, s.hardware.f_r_max_hz);
  std::vector<double> table(static_cast<std::size_t>(s.configurations) *
                            s.hardware.elements());
  for (auto& v : table) v = u(rng);
  const DmaConfiguration cfg = build_configuration(s, table);

  std::stringstream buf;
  dump_combiner_csv(cfg, buf);
  const DmaConfiguration back = load_combiner_csv(buf);

  CHECK(back.states == cfg.states);
  CHECK(back.subcarriers == cfg.subcarriers);
  REQUIRE(back.w.size() == cfg.w.size());
  for (std::size_t i = 0; i < cfg.w.size(); ++i) {
    REQUIRE(back.w[i].blocks.size() == cfg.w[i].blocks.size());
    for (std::size_t b = 0; b < cfg.w[i].blocks.size(); ++b)
      CHECK(back.w[i].blocks[b] == cfg.w[i].blocks[b]);  // %.17g is lossless
  }
  REQUIRE(back.f_r_table.size() == cfg.f_r_table.size());
  for (std::size_t i = 0; i < cfg.f_r_table.size(); ++i)
    CHECK(back.f_r_table[i] == cfg.f_r_table[i]);

  std::istringstream garbage("j,k,n,m,re,im\n0,0,0,0,1,0\n");
  CHECK_THROWS_AS(load_combiner_csv(garbage), ConfigError);
}

TEST_CASE("configuration table covers every state and subcarrier") {
  Scenario s = default_scenario();
  s.waveform.subcarriers = 8;  // keep it small
  std::vector<double> table(static_cast<std::size_t>(s.configurations) *
                                s.hardware.elements(),
                            20e9);
  const DmaConfiguration cfg = build_configuration(s, table);
  CHECK(cfg.states == 4);
  CHECK(cfg.subcarriers == 8);
  CHECK(cfg.w.size() == 32);
  CHECK(cfg.at(3, 7).chains == 4);
  CHECK_THROWS_AS(build_configuration(s, std::vector<double>(5, 20e9)),
                  ValidationError);
}
