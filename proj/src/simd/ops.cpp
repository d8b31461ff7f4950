#include "cayley/simd/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace cayley::simd {

void add_periodic(std::span<const double> in, std::span<double> out, std::size_t run,
                  std::span<const double> pattern, const KernelTable& kt) {
  if (out.size() != in.size()) throw std::invalid_argument("add_periodic: size mismatch");
  if (run == 0 || (pattern.size() != 2 && pattern.size() != 4)) {
    throw std::invalid_argument("add_periodic: run must be positive and radix 2 or 4");
  }
  kt.add_periodic(in.data(), out.data(), in.size(), run, pattern.size(), pattern.data());
}

double log_normalize(std::span<double> values, const KernelTable& kt) {
  if (values.empty()) throw std::invalid_argument("log_normalize: empty table");
  const double shift = kt.max_value(values.data(), values.size());
  if (!std::isfinite(shift)) throw std::domain_error("log_normalize: non-finite log-weight");
  const double sum = kt.exp_shift_sum(values.data(), values.size(), shift);
  kt.scale(values.data(), values.size(), 1.0 / sum);
  return shift + std::log(sum);
}

void block_sum(std::span<const double> in, std::span<double> out, const KernelTable& kt) {
  if (out.empty() || in.size() % out.size() != 0) {
    throw std::invalid_argument("block_sum: input is not a whole number of blocks");
  }
  kt.block_sum(in.data(), out.data(), out.size(), in.size() / out.size());
}

void polyval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out,
             const KernelTable& kt) {
  if (out.size() != t.size()) throw std::invalid_argument("polyval: size mismatch");
  kt.polyval(coeffs.data(), coeffs.size(), t.data(), out.data(), t.size());
}

}  // namespace cayley::simd
