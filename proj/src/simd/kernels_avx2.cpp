// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached through the
// runtime dispatcher after a CPU feature check.

#include "cayley/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace cayley::simd {
namespace {

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

// exp(x) to ~1 ulp for x in [-708, 709]; flushes to zero below -708 where the
// reference would produce subnormals.
inline __m256d exp_pd(__m256d x) {
  const __m256d underflow = _mm256_set1_pd(-708.0);
  const __m256d overflow = _mm256_set1_pd(709.0);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(0.6931471805599453);
  const __m256d ln2_lo = _mm256_set1_pd(2.3190468138462996e-17);

  const __m256d flush = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, underflow), overflow);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // Taylor series to degree 13 on |r| <= ln2/2.
  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,      1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,         0.5,
      1.0,                1.0,
  };
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  // 2^n via the exponent field: (n + 1023) << 52.
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), magic);
  __m256i e = _mm256_sub_epi64(_mm256_castpd_si256(biased), _mm256_castpd_si256(magic));
  e = _mm256_slli_epi64(e, 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(e));
  return _mm256_andnot_pd(flush, result);
}

void add_periodic(const double* in, double* out, std::size_t n, std::size_t run,
                  std::size_t radix, const double* pattern) {
  std::size_t j = 0;
  if (run == 1 && radix == 4) {
    const __m256d p = _mm256_loadu_pd(pattern);
    for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(in + j), p));
  } else if (run <= 2 && radix == 2) {
    const __m256d p = run == 1 ? _mm256_setr_pd(pattern[0], pattern[1], pattern[0], pattern[1])
                               : _mm256_setr_pd(pattern[0], pattern[0], pattern[1], pattern[1]);
    for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(in + j), p));
  } else if (run % 4 == 0) {
    for (std::size_t seg = 0; j < n; ++seg) {
      const double value = pattern[seg % radix];
      const __m256d p = _mm256_set1_pd(value);
      const std::size_t end = j + run < n ? j + run : n;
      for (; j + 4 <= end; j += 4) {
        _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(in + j), p));
      }
      for (; j < end; ++j) out[j] = in[j] + value;
    }
  }
  for (; j < n; ++j) out[j] = in[j] + pattern[(j / run) % radix];
}

double max_value(const double* x, std::size_t n) {
  double m = -INFINITY;
  std::size_t j = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (j = 4; j + 4 <= n; j += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + j));
    m = hmax(acc);
  }
  for (; j < n; ++j) {
    if (x[j] > m) m = x[j];
  }
  return m;
}

double exp_shift_sum(double* x, std::size_t n, double shift) {
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256d a = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + j), s));
    const __m256d b = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + j + 4), s));
    _mm256_storeu_pd(x + j, a);
    _mm256_storeu_pd(x + j + 4, b);
    acc0 = _mm256_add_pd(acc0, a);
    acc1 = _mm256_add_pd(acc1, b);
  }
  for (; j + 4 <= n; j += 4) {
    const __m256d a = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + j), s));
    _mm256_storeu_pd(x + j, a);
    acc0 = _mm256_add_pd(acc0, a);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) {
    x[j] = std::exp(x[j] - shift);
    sum += x[j];
  }
  return sum;
}

void scale(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(x + j, _mm256_mul_pd(_mm256_loadu_pd(x + j), f));
  for (; j < n; ++j) x[j] *= factor;
}

void block_sum(const double* in, double* out, std::size_t block, std::size_t blocks) {
  std::size_t i = 0;
  for (; i + 4 <= block; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t b = 0; b < blocks; ++b) acc = _mm256_add_pd(acc, _mm256_loadu_pd(in + b * block + i));
    _mm256_storeu_pd(out + i, acc);
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
  for (; j + 4 <= n; j += 4) {
    const __m256d tv = _mm256_loadu_pd(t + j);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < ncoeffs; ++c) acc = _mm256_fmadd_pd(acc, tv, _mm256_set1_pd(coeffs[c]));
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ncoeffs; ++c) acc = std::fma(acc, t[j], coeffs[c]);
    out[j] = acc;
  }
}

constexpr KernelTable kAvx2{
    Isa::avx2, "avx2", add_periodic, max_value, exp_shift_sum, scale, block_sum, polyval,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace cayley::simd
