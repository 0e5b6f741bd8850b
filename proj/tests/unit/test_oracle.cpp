#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qlf/error.hpp"
#include "qlf/oracle.hpp"
#include "qlf/special_fn.hpp"
#include "reference_values.hpp"

namespace {

using qlf::Complex;
namespace ref = qlf::testing;

TEST(DirectZ, MatchesHurwitzReferences) {
  for (const auto& z : ref::kZReferences) {
    const auto res = qlf::direct_Z(z.q, z.t, 1e-10);
    EXPECT_NEAR(res.Z, z.Z, 1e-10) << z.q << ' ' << z.t;
    EXPECT_NEAR(res.theta, z.theta, 1e-12) << z.q << ' ' << z.t;
    EXPECT_LT(res.tail_bound, 1e-10 / 8.0);
  }
}

TEST(DirectZ, SmallConductorIsPositiveAndStable) {
  const auto a = qlf::direct_Z(5, 0.0, 1e-6);
  const auto b = qlf::direct_Z(5, 0.0, 1e-12);
  EXPECT_GT(a.Z, 0.0);
  EXPECT_NEAR(a.Z, b.Z, 1e-8);
  EXPECT_GT(b.N_used, a.N_used);
}

TEST(DirectZ, DoublingNChangesLessThanTail) {
  for (std::int64_t q : {13, 101, 10009}) {
    for (double t : {0.0, 0.7}) {
      const auto res = qlf::direct_Z(q, t, 1e-6);
      const Complex doubled = qlf::direct_F(q, t, 2 * res.N_used);
      const double z2 = 2.0 * (std::polar(1.0, res.theta) * doubled).real();
      EXPECT_LE(std::abs(z2 - res.Z), 2.0 * res.tail_bound + 1e-15) << q << ' ' << t;
    }
  }
}

TEST(DirectZ, IsEvenInT) {
  for (std::int64_t q : {5, 29, 1001, 10009, 20005}) {
    if (!ref::is_fundamental_odd(q)) continue;
    for (double t : {0.25, 1.0, 4.0}) {
      EXPECT_NEAR(qlf::direct_Z(q, t, 1e-10).Z, qlf::direct_Z(q, -t, 1e-10).Z, 1e-9) << q << ' ' << t;
    }
  }
}

TEST(DirectZ, Preconditions) {
  EXPECT_THROW(qlf::direct_Z(9, 0.0, 1e-6), qlf::DomainError);
  EXPECT_THROW(qlf::direct_Z(7, 0.0, 1e-6), qlf::DomainError);
  EXPECT_THROW(qlf::direct_Z(5, 10.5, 1e-6), qlf::DomainError);
  EXPECT_THROW(qlf::direct_Z(5, 0.0, 2.0), qlf::DomainError);
}

TEST(DirectF, TwoFormsAgree) {
  for (std::int64_t q : {5, 13, 1005, 10009}) {
    if (!ref::is_fundamental_odd(q)) continue;
    for (double t : {0.0, 0.3, 2.0}) {
      const std::int64_t N = qlf::oracle_truncation(q, t, 1e-9);
      const Complex v = qlf::direct_F(q, t, N);
      const Complex g = qlf::direct_F_kernel_form(q, t, N);
      EXPECT_LT(std::abs(v - g), 1e-10) << q << ' ' << t;
    }
  }
}

TEST(DirectF, FirstTermsForThirteen) {
  // chi_13: 1, -1, 1, 1, -1, ... ; (13 / 2) = -1, (13 / 3) = (1 / 3) = 1
  EXPECT_EQ(ref::character_euler(13, 2), -1);
  EXPECT_EQ(ref::character_euler(13, 3), 1);
  const double t = 0.2;
  Complex expect = 0.0;
  const int chi[] = {1, -1, 1};
  for (int n = 1; n <= 3; ++n) {
    const double w = std::numbers::pi * n * n / 13.0;
    expect += static_cast<double>(chi[n - 1]) * std::pow(Complex(n), Complex(-0.5, -t)) *
              qlf::weight_v({0.5, t}, w);
  }
  EXPECT_LT(std::abs(qlf::direct_F(13, t, 3) - expect), 1e-14);
}

TEST(DirectF, ZIsTwiceRotatedRealPart) {
  const auto res = qlf::direct_Z(10009, 0.3, 1e-8);
  const Complex F = qlf::direct_F(10009, 0.3, res.N_used);
  EXPECT_NEAR(2.0 * (std::polar(1.0, res.theta) * F).real(), res.Z, 1e-14);
  // the rotated sum is real only after adding its conjugate; the imaginary
  // part is not small in general
  EXPECT_EQ(res.F, F);
}

TEST(OracleTruncation, TailBelowTarget) {
  for (std::int64_t q : {5, 1001, 10009, 200001}) {
    const std::int64_t N = qlf::oracle_truncation(q, 0.0, 1e-7);
    EXPECT_LT(qlf::oracle_tail_bound(q, 0.0, N), 1e-7);
    EXPECT_GE(static_cast<double>(N), std::sqrt(2.0 * q / std::numbers::pi));
  }
}

TEST(DirectZ, CallCountGrowsLikeSqrtQ) {
  const auto small = qlf::direct_Z(10009, 0.0, 1e-6);
  const auto large = qlf::direct_Z(160001, 0.0, 1e-6);
  const double ratio = static_cast<double>(large.special_calls) / static_cast<double>(small.special_calls);
  EXPECT_GT(ratio, 4.0);  // sqrt(16) = 4, times a slowly growing log factor
  EXPECT_LT(ratio, 5.0);
}

}  // namespace
