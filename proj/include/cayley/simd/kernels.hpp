#pragma once

// Data-parallel inner loops used by the enumeration oracles, the posterior
// tables and the scalar root scanner. Every kernel has a scalar reference
// implementation; vector variants are compiled in separate translation units
// and selected once at runtime from the host CPU features.
//
// The table deliberately uses raw pointers and sizes so the vector
// translation units stay free of library templates (their code must never be
// picked up by the linker for callers running on older CPUs).

#include <cstddef>

namespace cayley::simd {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

struct KernelTable {
  Isa isa;
  const char* name;

  // out[j] = in[j] + pattern[(j / run) % radix], radix in {2, 4}.
  void (*add_periodic)(const double* in, double* out, std::size_t n, std::size_t run,
                       std::size_t radix, const double* pattern);

  // max_j x[j]; -inf for n == 0.
  double (*max_value)(const double* x, std::size_t n);

  // x[j] <- exp(x[j] - shift); returns the sum of the new values.
  double (*exp_shift_sum)(double* x, std::size_t n, double shift);

  // x[j] <- x[j] * factor.
  void (*scale)(double* x, std::size_t n, double factor);

  // out[i] = sum_b in[b * block + i] for i < block, b < blocks (b ascending).
  void (*block_sum)(const double* in, double* out, std::size_t block, std::size_t blocks);

  // Horner evaluation, coefficients highest degree first: out[j] = p(t[j]).
  void (*polyval)(const double* coeffs, std::size_t ncoeffs, const double* t, double* out,
                  std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled into this build.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

bool cpu_supports(Isa isa);

// Kernel table for `isa` if it is both compiled in and supported by the host.
const KernelTable* kernels_for(Isa isa);

// Best table for this host, chosen on first use.
const KernelTable& active_kernels();

}  // namespace cayley::simd
