#pragma once

#include <cstddef>
#include <string>

#include "dmasense/common.hpp"

namespace dmasense::kernels {

struct Moments {
  double weight_sum = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

struct SumPair {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// Hot-loop primitives. One scalar reference implementation defines the
/// semantics; vector variants must agree with it on every input (see
/// tests/test_kernels.cpp for the tolerance).
struct Ops {
  const char* name;
  // sum conj(a[i]) * b[i]
  cplx (*cdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum |a[i]|^2
  double (*cnorm2)(const cplx* a, std::size_t n);
  // normalized Lorentzian polarizability at frequency f for each resonant
  // frequency f_r[i]:  damping*f / (2*pi*(f_r^2 - f^2) + j*damping*f)
  void (*lorentzian)(double f, double damping, const double* f_r,
                     std::size_t n, cplx* out);
  // weighted mean and central second moment of x under weights w (two-pass)
  Moments (*weighted_moments)(const double* w, const double* x, std::size_t n);
  SumPair (*sum_sumsq)(const double* x, std::size_t n);
};

const Ops& scalar();
bool avx2_supported();

#if defined(DMASENSE_HAVE_AVX2)
const Ops& avx2();
#endif

/// Currently selected implementation. Resolved once from the
/// DMASENSE_KERNELS environment variable ("scalar", "avx2" or "auto");
/// defaults to the widest supported instruction set.
const Ops& active();

/// Override the active implementation ("scalar", "avx2", "auto").
/// Throws ValidationError for unknown or unsupported names.
void select(const std::string& name);

}  // namespace dmasense::kernels
