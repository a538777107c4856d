#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dmasense/scenario.hpp"

using namespace dmasense;

TEST_CASE("table defaults carry the documented values") {
  const Scenario s = default_scenario();
  CHECK(s.waveform.carrier_hz == 20e9);
  CHECK(s.waveform.subcarriers == 128);
  CHECK(s.waveform.spacing_hz == 500e6 / 128.0);  // 3.90625 MHz exactly
  CHECK(s.waveform.spacing_hz == 3906250.0);
  CHECK(s.waveform.bandwidth_hz() == doctest::Approx(500e6).epsilon(1e-15));
  CHECK(s.waveform.tx_power_w == doctest::Approx(dbm_to_watts(10.0)).epsilon(1e-15));
  CHECK(s.hardware.elements() == 32);
  CHECK(s.hardware.rf_chains == 4);
  CHECK(s.configurations == 4);
  // Gamma = 2*pi*f_c/Q_c with Q_c = 100
  CHECK(s.hardware.damping_rad_hz == doctest::Approx(kTwoPi * 20e9 / 100.0).epsilon(1e-15));
  CHECK(s.hardware.damping_rad_hz == doctest::Approx(1.2566370614359172e9).epsilon(1e-12));
  // d_x = lambda/2, about 7.5 mm at 20 GHz
  CHECK(s.hardware.element_spacing_m == doctest::Approx(0.0075).epsilon(1e-2));
  CHECK(s.hardware.element_spacing_m == 0.5 * kSpeedOfLight / 20e9);
  CHECK(s.hardware.leakage_fraction == 0.8);
  CHECK(s.hardware.tuning_bandwidth_hz() == doctest::Approx(500e6));
  CHECK(s.waveform.pilot_symbols == 1);
  CHECK(s.geometry.ue == std::array<double, 2>{3.0, 3.0});
  REQUIRE(s.geometry.sps.size() == 2);
  CHECK(s.geometry.sps[0] == std::array<double, 2>{5.0, 3.0});
  CHECK(s.geometry.sps[1] == std::array<double, 2>{4.0, 4.0});
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("subcarrier grid is increasing and symmetric about the carrier") {
  for (int k_count : {1, 2, 3, 16, 128, 255}) {
    Waveform w;
    w.subcarriers = k_count;
    const auto grid = w.subcarrier_grid();
    REQUIRE(static_cast<int>(grid.size()) == k_count);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    // pairwise-symmetric mean
    double acc = 0.0;
    for (int i = 0; i < k_count; ++i) acc += grid[i] - w.carrier_hz;
    CHECK(std::abs(acc / k_count) <= 1e-12 * w.carrier_hz);
  }
  // Table-I grid values are exact integers; the mean is exactly f_c.
  Waveform w;
  double acc = 0.0;
  for (int k = 0; k < w.subcarriers; ++k) acc += w.subcarrier_hz(k);
  CHECK(acc / w.subcarriers == w.carrier_hz);
}

TEST_CASE("empty config falls back to the defaults") {
  std::istringstream empty("");
  const Scenario s = parse_scenario(empty);
  CHECK(save_scenario_string(s) == save_scenario_string(default_scenario()));
  CHECK(s.hash() == default_scenario().hash());
}

TEST_CASE("full config round-trips bit-exactly") {
  Scenario s = default_scenario();
  s.waveform.carrier_hz = 27.123456789e9;
  s.waveform.spacing_hz = 1234567.125;
  s.waveform.tx_power_w = 0.003141592653589793;
  s.geometry.ue = {1.25, -7.5};
  s.geometry.sps = {{2.5, 0.125}, {-3.0, 4.0}, {0.5, -0.25}};
  s.geometry.reflections = {cplx{0.5, -0.25}, cplx{1, 0}, cplx{-0.125, 0.75}};
  s.hardware.f_r_min_hz = 26.9e9;
  s.hardware.f_r_max_hz = 27.4e9;
  s.hardware.element_spacing_m = 0.0055;
  s.hardware.damping_rad_hz = 1.7e9;

  std::istringstream in(save_scenario_string(s));
  const Scenario back = parse_scenario(in);
  CHECK(save_scenario_string(back) == save_scenario_string(s));
  CHECK(back.waveform.carrier_hz == s.waveform.carrier_hz);
  CHECK(back.waveform.spacing_hz == s.waveform.spacing_hz);
  CHECK(back.waveform.tx_power_w == s.waveform.tx_power_w);
  CHECK(back.geometry.reflections[0] == s.geometry.reflections[0]);
}

TEST_CASE("unit suffixes: dBm, MHz, GHz") {
  std::istringstream in(
      "[waveform]\n"
      "carrier_hz = 20 GHz\n"
      "bandwidth_hz = 500 MHz\n"
      "tx_power = 10 dBm\n"
      "noise_power = -100 dBm\n");
  const Scenario s = parse_scenario(in);
  CHECK(s.waveform.carrier_hz == 20e9);
  CHECK(s.waveform.spacing_hz == doctest::Approx(500e6 / 128.0).epsilon(1e-15));
  CHECK(s.waveform.tx_power_w == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(s.waveform.noise_power_w == doctest::Approx(1e-13).epsilon(1e-12));
}

TEST_CASE("defaults derived from an overridden carrier") {
  std::istringstream in("[waveform]\ncarrier_hz = 10 GHz\n");
  const Scenario s = parse_scenario(in);
  CHECK(s.hardware.element_spacing_m == 0.5 * kSpeedOfLight / 10e9);
  CHECK(s.hardware.damping_rad_hz == doctest::Approx(kTwoPi * 10e9 / 100.0));
  CHECK(s.hardware.f_r_min_hz == doctest::Approx(10e9 - 250e6));
  CHECK(s.hardware.f_r_max_hz == doctest::Approx(10e9 + 250e6));
}

TEST_CASE("validation errors name the violated invariant") {
  {
    std::istringstream in(
        "[hardware]\nf_r_min_hz = 20.25 GHz\nf_r_max_hz = 19.75 GHz\n");
    CHECK_THROWS_WITH_AS(parse_scenario(in), "tuning limits inverted",
                         ValidationError);
  }
  {
    std::istringstream in("[hardware]\nleakage_fraction = 1.0\n");
    CHECK_THROWS_AS(parse_scenario(in), ValidationError);
  }
  {
    std::istringstream in("[geometry]\nue = 0 0\n");
    CHECK_THROWS_WITH_AS(parse_scenario(in), "UE collocated with receiver",
                         ValidationError);
  }
  {
    std::istringstream in("[waveform]\ntx_power = 0\n");
    CHECK_THROWS_AS(parse_scenario(in), ValidationError);
  }
}

TEST_CASE("malformed input is a parse error") {
  {
    std::istringstream in("[waveform\ncarrier_hz = 20e9\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  {
    std::istringstream in("[waveform]\ncarrier_hz 20e9\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  {
    std::istringstream in("[waveform]\ncarrier_hz = fast\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
  {
    std::istringstream in("[waveform]\ncarier_hz = 20e9\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);  // unknown key
  }
  {
    std::istringstream in("[waveform]\nbandwidth_hz = 5e8\nsubcarrier_spacing_hz = 1e6\n");
    CHECK_THROWS_AS(parse_scenario(in), ConfigError);
  }
}

TEST_CASE("scenario hash is stable and value-sensitive") {
  const Scenario a = default_scenario();
  Scenario b = default_scenario();
  CHECK(a.hash() == b.hash());
  b.waveform.carrier_hz += 1.0;
  CHECK(a.hash() != b.hash());
}
