// AArch64 NEON variants (float64x2). NEON is baseline on AArch64, so no
// runtime feature probe is needed beyond the build flag.

#include "cayley/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <cstdint>

namespace cayley::simd {
namespace {

// exp(x) to ~1 ulp for x in [-708, 709]; flushes to zero below -708.
inline float64x2_t exp_pd(float64x2_t x) {
  const float64x2_t underflow = vdupq_n_f64(-708.0);
  const float64x2_t overflow = vdupq_n_f64(709.0);
  const uint64x2_t flush = vcltq_f64(x, underflow);
  x = vminq_f64(vmaxq_f64(x, underflow), overflow);

  const float64x2_t n = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634)));
  float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(0.6931471805599453));
  r = vfmsq_f64(r, n, vdupq_n_f64(2.3190468138462996e-17));

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,      1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,         0.5,
      1.0,                1.0,
  };
  float64x2_t p = vdupq_n_f64(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = vfmaq_f64(vdupq_n_f64(kInvFact[i]), p, r);

  const int64x2_t e = vshlq_n_s64(vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023)), 52);
  const float64x2_t result = vmulq_f64(p, vreinterpretq_f64_s64(e));
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(result), flush));
}

void add_periodic(const double* in, double* out, std::size_t n, std::size_t run,
                  std::size_t radix, const double* pattern) {
  std::size_t j = 0;
  if (run == 1 && (radix == 2 || radix == 4)) {
    const float64x2_t p01 = vld1q_f64(pattern);
    const float64x2_t p23 = radix == 4 ? vld1q_f64(pattern + 2) : p01;
    for (; j + 4 <= n; j += 4) {
      vst1q_f64(out + j, vaddq_f64(vld1q_f64(in + j), p01));
      vst1q_f64(out + j + 2, vaddq_f64(vld1q_f64(in + j + 2), p23));
    }
  } else if (run % 2 == 0) {
    for (std::size_t seg = 0; j < n; ++seg) {
      const double value = pattern[seg % radix];
      const float64x2_t p = vdupq_n_f64(value);
      const std::size_t end = j + run < n ? j + run : n;
      for (; j + 2 <= end; j += 2) vst1q_f64(out + j, vaddq_f64(vld1q_f64(in + j), p));
      for (; j < end; ++j) out[j] = in[j] + value;
    }
  }
  for (; j < n; ++j) out[j] = in[j] + pattern[(j / run) % radix];
}

double max_value(const double* x, std::size_t n) {
  double m = -INFINITY;
  std::size_t j = 0;
  if (n >= 2) {
    float64x2_t acc = vld1q_f64(x);
    for (j = 2; j + 2 <= n; j += 2) acc = vmaxq_f64(acc, vld1q_f64(x + j));
    m = vmaxvq_f64(acc);
  }
  for (; j < n; ++j) {
    if (x[j] > m) m = x[j];
  }
  return m;
}

double exp_shift_sum(double* x, std::size_t n, double shift) {
  const float64x2_t s = vdupq_n_f64(shift);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t a = exp_pd(vsubq_f64(vld1q_f64(x + j), s));
    vst1q_f64(x + j, a);
    acc = vaddq_f64(acc, a);
  }
  double sum = vaddvq_f64(acc);
  for (; j < n; ++j) {
    x[j] = std::exp(x[j] - shift);
    sum += x[j];
  }
  return sum;
}

void scale(double* x, std::size_t n, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(x + j, vmulq_f64(vld1q_f64(x + j), f));
  for (; j < n; ++j) x[j] *= factor;
}

void block_sum(const double* in, double* out, std::size_t block, std::size_t blocks) {
  std::size_t i = 0;
  for (; i + 2 <= block; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t b = 0; b < blocks; ++b) acc = vaddq_f64(acc, vld1q_f64(in + b * block + i));
    vst1q_f64(out + i, acc);
  }
  for (; i < block; ++i) {
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) acc += in[b * block + i];
    out[i] = acc;
  }
}

void polyval(const double* coeffs, std::size_t ncoeffs, const double* t, double* out,
             std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t tv = vld1q_f64(t + j);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < ncoeffs; ++c) acc = vfmaq_f64(vdupq_n_f64(coeffs[c]), acc, tv);
    vst1q_f64(out + j, acc);
  }
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ncoeffs; ++c) acc = std::fma(acc, t[j], coeffs[c]);
    out[j] = acc;
  }
}

constexpr KernelTable kNeon{
    Isa::neon, "neon", add_periodic, max_value, exp_shift_sum, scale, block_sum, polyval,
};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace cayley::simd
