#pragma once

// Span-level wrappers over the kernel table. Each takes an optional table so
// tests can pin a specific variant; by default the runtime-selected one runs.

#include <span>

#include "cayley/simd/kernels.hpp"

namespace cayley::simd {

// out[j] = in[j] + pattern[(j / run) % pattern.size()]; pattern.size() in {2, 4}.
void add_periodic(std::span<const double> in, std::span<double> out, std::size_t run,
                  std::span<const double> pattern, const KernelTable& kt = active_kernels());

// Turns log-weights into probabilities in place (max-subtraction first) and
// returns the log of the normalizer.
double log_normalize(std::span<double> values, const KernelTable& kt = active_kernels());

// Sums `in` over its outermost blocks: out[i] = sum_b in[b * out.size() + i].
void block_sum(std::span<const double> in, std::span<double> out,
               const KernelTable& kt = active_kernels());

void polyval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out,
             const KernelTable& kt = active_kernels());

}  // namespace cayley::simd
