#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cayley/simd/kernels.hpp"
#include "cayley/simd/ops.hpp"

using namespace cayley::simd;

namespace {

std::vector<const KernelTable*> vector_variants() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const KernelTable* kt = kernels_for(isa)) out.push_back(kt);
  }
  return out;
}

std::vector<double> random_vec(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257, 1024, 4099};

}  // namespace

TEST_CASE("dispatch") {
  CHECK(scalar_kernels().isa == Isa::scalar);
  CHECK(kernels_for(Isa::scalar) == &scalar_kernels());
  const KernelTable& active = active_kernels();
  CHECK(cpu_supports(active.isa));
  for (const KernelTable* kt : vector_variants()) CHECK(cpu_supports(kt->isa));
  MESSAGE("active kernels: " << active.name);
}

TEST_CASE("add_periodic agrees with scalar") {
  std::mt19937_64 rng(1);
  for (const KernelTable* kt : vector_variants()) {
    for (std::size_t radix : {2u, 4u}) {
      for (std::size_t run : {1u, 2u, 3u, 4u, 16u, 64u}) {
        for (std::size_t n : kSizes) {
          const auto in = random_vec(n, -5, 5, rng);
          const auto pat = random_vec(radix, -3, 3, rng);
          std::vector<double> a(n), b(n);
          add_periodic(in, a, run, pat, scalar_kernels());
          add_periodic(in, b, run, pat, *kt);
          CHECK(a == b);
          for (std::size_t j = 0; j < n; ++j) CHECK(a[j] == in[j] + pat[(j / run) % radix]);
        }
      }
    }
  }
}

TEST_CASE("max and exp agree with scalar") {
  std::mt19937_64 rng(2);
  for (const KernelTable* kt : vector_variants()) {
    for (std::size_t n : kSizes) {
      auto x = random_vec(n, -50, 50, rng);
      CHECK(kt->max_value(x.data(), n) == scalar_kernels().max_value(x.data(), n));
      if (n == 0) continue;
      const double shift = scalar_kernels().max_value(x.data(), n);
      auto a = x, b = x;
      const double sa = scalar_kernels().exp_shift_sum(a.data(), n, shift);
      const double sb = kt->exp_shift_sum(b.data(), n, shift);
      CHECK(sb == doctest::Approx(sa).epsilon(1e-14));
      for (std::size_t j = 0; j < n; ++j) CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-14));
      scalar_kernels().scale(a.data(), n, 0.37);
      kt->scale(b.data(), n, 0.37);
      for (std::size_t j = 0; j < n; ++j) CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-14));
    }
  }
  CHECK(scalar_kernels().max_value(nullptr, 0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("exp at extreme inputs") {
  std::vector<double> x{-800.0, -745.0, -700.0, -1e-300, 0.0, -36.7, -1e5};
  for (const KernelTable* kt : {&scalar_kernels(), vector_variants().empty() ? &scalar_kernels()
                                                                            : vector_variants().front()}) {
    auto y = x;
    kt->exp_shift_sum(y.data(), y.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double want = std::exp(x[j]);
      if (want < 1e-300) {
        CHECK(y[j] < 1e-300);
        CHECK(y[j] >= 0.0);
      } else {
        CHECK(y[j] == doctest::Approx(want).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("log_normalize") {
  std::vector<double> v{std::log(1.0), std::log(3.0), std::log(4.0)};
  const double lz = log_normalize(v);
  CHECK(lz == doctest::Approx(std::log(8.0)));
  CHECK(v[1] == doctest::Approx(0.375));
  std::vector<double> big{1000.0, 1000.0};
  CHECK(log_normalize(big) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(big[0] == doctest::Approx(0.5));
  std::vector<double> bad{std::numeric_limits<double>::infinity()};
  CHECK_THROWS(log_normalize(bad));
  std::vector<double> empty;
  CHECK_THROWS(log_normalize(empty));
}

TEST_CASE("block_sum agrees with scalar") {
  std::mt19937_64 rng(3);
  for (const KernelTable* kt : vector_variants()) {
    for (std::size_t block : {1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u, 255u}) {
      for (std::size_t blocks : {1u, 2u, 4u, 7u}) {
        const auto in = random_vec(block * blocks, 0, 1, rng);
        std::vector<double> a(block), b(block);
        block_sum(in, a, scalar_kernels());
        block_sum(in, b, *kt);
        for (std::size_t i = 0; i < block; ++i) {
          CHECK(a[i] == b[i]);
          double s = 0.0;
          for (std::size_t q = 0; q < blocks; ++q) s += in[q * block + i];
          CHECK(a[i] == s);
        }
      }
    }
  }
  std::vector<double> in(5), out(2);
  CHECK_THROWS(block_sum(in, out));
}

TEST_CASE("polyval agrees with scalar") {
  std::mt19937_64 rng(4);
  for (const KernelTable* kt : vector_variants()) {
    for (std::size_t deg : {0u, 1u, 2u, 5u, 11u}) {
      const auto c = random_vec(deg + 1, -2, 2, rng);
      for (std::size_t n : kSizes) {
        const auto t = random_vec(n, 0.1, 3.0, rng);
        std::vector<double> a(n), b(n);
        polyval(c, t, a, scalar_kernels());
        polyval(c, t, b, *kt);
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-13).scale(10.0));
          double h = 0.0;
          for (double ci : c) h = h * t[j] + ci;
          CHECK(a[j] == h);
        }
      }
    }
  }
  const std::vector<double> c{1.0, -3.0, 2.0};  // (t-1)(t-2)
  const std::vector<double> t{1.0, 2.0, 3.0};
  std::vector<double> out(3);
  polyval(c, t, out);
  CHECK(out == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("argument checks") {
  std::vector<double> in(4), out(3), pat(3);
  CHECK_THROWS(add_periodic(in, out, 1, std::vector<double>(4)));
  std::vector<double> out4(4);
  CHECK_THROWS(add_periodic(in, out4, 1, pat));
  CHECK_THROWS(add_periodic(in, out4, 0, std::vector<double>(2)));
}
