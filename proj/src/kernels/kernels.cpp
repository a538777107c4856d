#include "dmasense/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace dmasense::kernels {

namespace {

cplx cdotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double cnorm2_scalar(const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

void lorentzian_scalar(double f, double damping, const double* f_r,
                       std::size_t n, cplx* out) {
  const double gf = damping * f;
  const double c1 = kTwoPi / gf;
  for (std::size_t i = 0; i < n; ++i) {
    // t = 2*pi*(f_r^2 - f^2) / (damping*f); response = (t - j) / (1 + t^2)
    const double t = c1 * (f_r[i] * f_r[i] - f * f);
    const double d = 1.0 / (1.0 + t * t);
    out[i] = {t * d, -d};
  }
}

Moments weighted_moments_scalar(const double* w, const double* x,
                                std::size_t n) {
  Moments m;
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
  }
  m.weight_sum = sw;
  if (sw == 0.0) return m;
  m.mean = swx / sw;
  double swd2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - m.mean;
    swd2 += w[i] * d * d;
  }
  m.variance = swd2 / sw;
  return m;
}

SumPair sum_sumsq_scalar(const double* x, std::size_t n) {
  SumPair s;
  for (std::size_t i = 0; i < n; ++i) {
    s.sum += x[i];
    s.sum_sq += x[i] * x[i];
  }
  return s;
}

const Ops kScalarOps = {
    "scalar",        cdotc_scalar, cnorm2_scalar, lorentzian_scalar,
    weighted_moments_scalar, sum_sumsq_scalar,
};

const Ops* resolve(const std::string& name) {
  if (name == "scalar") return &kScalarOps;
#if defined(DMASENSE_HAVE_AVX2)
  if (name == "avx2") {
    if (!avx2_supported())
      throw ValidationError("kernels: avx2 requested but not supported by this CPU");
    return &avx2();
  }
  if (name == "auto") return avx2_supported() ? &avx2() : &kScalarOps;
#else
  if (name == "avx2")
    throw ValidationError("kernels: avx2 not compiled into this build");
  if (name == "auto") return &kScalarOps;
#endif
  throw ValidationError("kernels: unknown implementation '" + name + "'");
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{[]() -> const Ops* {
    const char* env = std::getenv("DMASENSE_KERNELS");
    return resolve(env ? env : "auto");
  }()};
  return slot;
}

}  // namespace

const Ops& scalar() { return kScalarOps; }

bool avx2_supported() {
#if defined(DMASENSE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(const std::string& name) {
  active_slot().store(resolve(name), std::memory_order_relaxed);
}

}  // namespace dmasense::kernels
