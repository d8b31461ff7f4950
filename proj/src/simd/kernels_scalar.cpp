#include "cayley/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace cayley::simd {
namespace {

void add_periodic(const double* in, double* out, std::size_t n, std::size_t run,
                  std::size_t radix, const double* pattern) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = in[j] + pattern[(j / run) % radix];
  }
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j] > m) m = x[j];
  }
  return m;
}

double exp_shift_sum(double* x, std::size_t n, double shift) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::exp(x[j] - shift);
    sum += x[j];
  }
  return sum;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t j = 0; j < n; ++j) x[j] *= factor;
}

void block_sum(const double* in, double* out, std::size_t block, std::size_t blocks) {
  for (std::size_t i = 0; i < block; ++i) out[i] = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* src = in + b * block;
    for (std::size_t i = 0; i < block; ++i) out[i] += src[i];
  }
}

void polyval(const double* coeffs, std::size_t ncoeffs, const double* t, double* out,
             std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ncoeffs; ++c) acc = acc * t[j] + coeffs[c];
    out[j] = acc;
  }
}

constexpr KernelTable kScalar{
    Isa::scalar, "scalar", add_periodic, max_value, exp_shift_sum, scale, block_sum, polyval,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace cayley::simd
