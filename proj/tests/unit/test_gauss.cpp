#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qlf/error.hpp"
#include "qlf/gauss.hpp"

namespace {

using qlf::Complex;
namespace ref = qlf::testing;

double rel_err(Complex got, Complex expect) {
  return std::abs(got - expect) / std::max(1.0, std::abs(expect));
}

TEST(GaussDirect, MatchesLongDoubleSum) {
  for (std::int64_t b = 1; b < 60; b += 2) {
    for (std::int64_t n = 1; n < 80; ++n) {
      EXPECT_LT(rel_err(qlf::gauss_sum_direct(b, n), ref::gauss_sum_long(b, n)), 1e-12) << b << ' ' << n;
    }
  }
}

TEST(GaussDirect, HandValues) {
  // g_1(1) = 1 + e^{i pi} = 0; g_1(2) = 1 + i + 1 + i
  EXPECT_LT(std::abs(qlf::gauss_sum_direct(1, 1)), 1e-15);
  EXPECT_LT(std::abs(qlf::gauss_sum_direct(1, 2) - Complex(2.0, 2.0)), 1e-14);
  EXPECT_LT(std::abs(qlf::gauss_sum_direct(5, 2) - Complex(2.0, 2.0)), 1e-14);
}

TEST(GaussDirect, LargeArgumentsKeepExactReduction) {
  // shifting b by 4n leaves every phase unchanged
  const std::int64_t n = 997;
  EXPECT_LT(rel_err(qlf::gauss_sum_direct(3 + 4 * n * 1000003, n), qlf::gauss_sum_direct(3, n)), 1e-12);
}

TEST(GaussFast, QuarterLengthIdentity) {
  for (std::int64_t b = 1; b <= 99; b += 2) {
    for (std::int64_t m = 1; m <= 100; ++m) {
      EXPECT_LT(rel_err(qlf::gauss_sum_fast(b, m), qlf::gauss_sum_direct(b, 2 * m)), 1e-9) << b << ' ' << m;
    }
  }
}

TEST(GaussFast, RejectsEvenOrNonPositive) {
  EXPECT_THROW(qlf::gauss_sum_fast(4, 3), qlf::DomainError);
  EXPECT_THROW(qlf::gauss_sum_fast(3, 0), qlf::DomainError);
  EXPECT_THROW(qlf::gauss_sum_direct(-3, 2), qlf::DomainError);
}

TEST(GaussScaling, DivisorFactorsOut) {
  for (std::int64_t q = 1; q <= 1000; q += 2) {
    bool squarefree = true;
    for (const auto& [p, e] : ref::trial_factor(q)) squarefree = squarefree && e == 1;
    if (!squarefree) continue;
    for (std::int64_t a = 1; a <= q; a += 2) {
      if (q % a != 0) continue;
      for (std::int64_t m = 1; m <= 12; ++m) {
        const Complex lhs = qlf::gauss_sum_direct(q, 2 * a * m);
        const Complex rhs = static_cast<double>(a) * qlf::gauss_sum_fast(q / a, m);
        EXPECT_LT(rel_err(lhs, rhs), 1e-9) << q << ' ' << a << ' ' << m;
      }
    }
  }
}

TEST(CharacterFromGauss, RecoversKroneckerSymbol) {
  for (std::int64_t q = 5; q <= 600; q += 4) {
    if (!ref::is_fundamental_odd(q)) continue;
    for (std::int64_t n = 1; n <= 120; ++n) {
      if (std::gcd(n, q) != 1) continue;
      const Complex chi = qlf::character_from_gauss(q, n);
      EXPECT_NEAR(chi.real(), ref::character_euler(q, n), 1e-9) << q << ' ' << n;
      EXPECT_NEAR(chi.imag(), 0.0, 1e-9);
    }
  }
}

TEST(CharacterFromGauss, UnnormalizedProductCarriesSqrtN) {
  // g(q) g_q(2n) = sqrt(n) chi_q(n); the 1/sqrt(n) is what the main sum uses.
  for (std::int64_t n : {2, 3, 7, 11, 40}) {
    const Complex raw = qlf::g_prefactor(13) * qlf::gauss_sum_fast(13, n);
    EXPECT_NEAR(raw.real(), std::sqrt(static_cast<double>(n)) * ref::character_euler(13, n), 1e-10);
  }
}

TEST(CharacterFromGauss, RejectsCommonFactor) {
  EXPECT_THROW(qlf::character_from_gauss(21, 6), qlf::DomainError);
}

}  // namespace
