// AVX2/FMA variants of the hot-loop primitives. Compiled with -mavx2 -mfma;
// callers must check avx2_supported() before dispatching here (see
// kernels.cpp). Complex data is the standard interleaved re/im layout, two
// complex values per 256-bit vector.

#include "dmasense/kernels.hpp"

#if defined(DMASENSE_HAVE_AVX2)

#include <immintrin.h>

namespace dmasense::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

cplx cdotc_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();  // lanes: ar*br, ai*bi, ...
  __m256d acc_im = _mm256_setzero_pd();  // lanes: ar*bi, ai*br, ...
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d vb_swap = _mm256_permute_pd(vb, 0x5);  // [bi, br] per pair
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, vb_swap, acc_im);
  }
  alignas(32) double r[4], s[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(s, acc_im);
  double re = (r[0] + r[1]) + (r[2] + r[3]);
  double im = (s[0] - s[1]) + (s[2] - s[3]);
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double cnorm2_avx2(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    out += pa[2 * i] * pa[2 * i] + pa[2 * i + 1] * pa[2 * i + 1];
  }
  return out;
}

void lorentzian_avx2(double f, double damping, const double* f_r,
                     std::size_t n, cplx* out) {
  const double gf = damping * f;
  const double c1 = kTwoPi / gf;
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vf2 = _mm256_set1_pd(f * f);
  const __m256d vone = _mm256_set1_pd(1.0);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vfr = _mm256_loadu_pd(f_r + i);
    const __m256d t = _mm256_mul_pd(vc1, _mm256_fmsub_pd(vfr, vfr, vf2));
    const __m256d d = _mm256_div_pd(vone, _mm256_fmadd_pd(t, t, vone));
    const __m256d re = _mm256_mul_pd(t, d);
    const __m256d im = _mm256_sub_pd(_mm256_setzero_pd(), d);
    const __m256d lo = _mm256_unpacklo_pd(re, im);  // re0 im0 re2 im2
    const __m256d hi = _mm256_unpackhi_pd(re, im);  // re1 im1 re3 im3
    _mm256_storeu_pd(po + 2 * i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(po + 2 * i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  for (; i < n; ++i) {
    const double t = c1 * (f_r[i] * f_r[i] - f * f);
    const double d = 1.0 / (1.0 + t * t);
    out[i] = {t * d, -d};
  }
}

Moments weighted_moments_avx2(const double* w, const double* x,
                              std::size_t n) {
  Moments m;
  __m256d vsw = _mm256_setzero_pd();
  __m256d vswx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    vsw = _mm256_add_pd(vsw, vw);
    vswx = _mm256_fmadd_pd(vw, vx, vswx);
  }
  double sw = hsum(vsw), swx = hsum(vswx);
  for (; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
  }
  m.weight_sum = sw;
  if (sw == 0.0) return m;
  m.mean = swx / sw;
  const __m256d vmean = _mm256_set1_pd(m.mean);
  __m256d vswd2 = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d vd = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmean);
    vswd2 = _mm256_fmadd_pd(_mm256_mul_pd(vw, vd), vd, vswd2);
  }
  double swd2 = hsum(vswd2);
  for (; i < n; ++i) {
    const double d = x[i] - m.mean;
    swd2 += w[i] * d * d;
  }
  m.variance = swd2 / sw;
  return m;
}

SumPair sum_sumsq_avx2(const double* x, std::size_t n) {
  __m256d vs = _mm256_setzero_pd();
  __m256d vs2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    vs = _mm256_add_pd(vs, v);
    vs2 = _mm256_fmadd_pd(v, v, vs2);
  }
  SumPair s{hsum(vs), hsum(vs2)};
  for (; i < n; ++i) {
    s.sum += x[i];
    s.sum_sq += x[i] * x[i];
  }
  return s;
}

const Ops kAvx2Ops = {
    "avx2",        cdotc_avx2, cnorm2_avx2, lorentzian_avx2,
    weighted_moments_avx2, sum_sumsq_avx2,
};

}  // namespace

const Ops& avx2() { return kAvx2Ops; }

}  // namespace dmasense::kernels

#endif  // DMASENSE_HAVE_AVX2
