#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "dmasense/kernels.hpp"

using namespace dmasense;
namespace k = dmasense::kernels;

namespace {

std::mt19937_64 rng(0x5eed);

std::vector<cplx> random_cvec(std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

std::vector<double> random_vec(std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 257};

}  // namespace

TEST_CASE("scalar cdotc matches a hand-expanded dot") {
  const std::vector<cplx> a = {{1, 2}, {-3, 0.5}};
  const std::vector<cplx> b = {{0.25, -1}, {2, 2}};
  const cplx expect = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  const cplx got = k::scalar().cdotc(a.data(), b.data(), 2);
  CHECK(std::abs(got - expect) < 1e-15);
}

TEST_CASE("scalar cnorm2 and sum_sumsq semantics") {
  const std::vector<cplx> a = {{3, 4}, {0, -2}};
  CHECK(k::scalar().cnorm2(a.data(), 2) == doctest::Approx(29.0).epsilon(1e-15));
  const std::vector<double> x = {1.0, -2.0, 0.5};
  const auto s = k::scalar().sum_sumsq(x.data(), 3);
  CHECK(s.sum == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s.sum_sq == doctest::Approx(5.25).epsilon(1e-15));
}

TEST_CASE("scalar weighted_moments reproduces textbook mean/variance") {
  const std::vector<double> w = {1.0, 1.0, 2.0};
  const std::vector<double> x = {0.0, 1.0, 4.0};
  const auto m = k::scalar().weighted_moments(w.data(), x.data(), 3);
  CHECK(m.weight_sum == 4.0);
  CHECK(m.mean == doctest::Approx(2.25));
  // sum w (x - mean)^2 / sum w = (5.0625 + 1.5625 + 2*3.0625)/4
  CHECK(m.variance == doctest::Approx((5.0625 + 1.5625 + 2 * 3.0625) / 4.0));
  const auto zero = k::scalar().weighted_moments(x.data(), x.data(), 0);
  CHECK(zero.weight_sum == 0.0);
}

TEST_CASE("scalar lorentzian matches the complex rational form") {
  std::uniform_real_distribution<double> u(1e9, 4e10);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = u(rng), f_r = u(rng), damping = u(rng) * 1e-2;
    cplx out;
    k::scalar().lorentzian(f, damping, &f_r, 1, &out);
    const cplx direct = cplx{damping * f, 0.0} /
                        cplx{kTwoPi * (f_r * f_r - f * f), damping * f};
    CHECK(std::abs(out - direct) <= 1e-15 * std::abs(direct));
  }
}

#if defined(DMASENSE_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::avx2_supported()) {
    MESSAGE("avx2 not supported on this machine; skipping");
    return;
  }
  const k::Ops& simd = k::avx2();
  const k::Ops& ref = k::scalar();

  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto a = random_cvec(n), b = random_cvec(n);
    const cplx d0 = ref.cdotc(a.data(), b.data(), n);
    const cplx d1 = simd.cdotc(a.data(), b.data(), n);
    CHECK(std::abs(d0 - d1) <= 1e-13 * (1.0 + std::abs(d0)));

    const double n0 = ref.cnorm2(a.data(), n);
    const double n1 = simd.cnorm2(a.data(), n);
    CHECK(n1 == doctest::Approx(n0).epsilon(1e-13));

    const auto w = random_vec(n), x = random_vec(n, -5.0, 5.0);
    const auto m0 = ref.weighted_moments(w.data(), x.data(), n);
    const auto m1 = simd.weighted_moments(w.data(), x.data(), n);
    CHECK(m1.weight_sum == doctest::Approx(m0.weight_sum).epsilon(1e-13));
    if (m0.weight_sum > 0) {
      CHECK(m1.mean == doctest::Approx(m0.mean).epsilon(1e-13));
      CHECK(m1.variance == doctest::Approx(m0.variance).epsilon(1e-12));
    }

    const auto s0 = ref.sum_sumsq(x.data(), n);
    const auto s1 = simd.sum_sumsq(x.data(), n);
    CHECK(s1.sum == doctest::Approx(s0.sum).epsilon(1e-13));
    CHECK(s1.sum_sq == doctest::Approx(s0.sum_sq).epsilon(1e-13));

    std::vector<double> f_r = random_vec(n, 19e9, 21e9);
    std::vector<cplx> l0(n), l1(n);
    ref.lorentzian(20e9, 1.2e9, f_r.data(), n, l0.data());
    simd.lorentzian(20e9, 1.2e9, f_r.data(), n, l1.data());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(l0[i] - l1[i]) <= 1e-14);
  }
}
#endif

TEST_CASE("kernel selection") {
  CHECK(std::string(k::scalar().name) == "scalar");
  CHECK_THROWS_AS(k::select("no-such-isa"), ValidationError);
  k::select("scalar");
  CHECK(std::string(k::active().name) == "scalar");
  k::select("auto");
  if (k::avx2_supported()) {
    CHECK(std::string(k::active().name) == "avx2");
  } else {
    CHECK(std::string(k::active().name) == "scalar");
  }
}
