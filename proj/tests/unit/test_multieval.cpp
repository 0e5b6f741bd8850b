#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qlf/error.hpp"
#include "qlf/gauss.hpp"
#include "qlf/multieval.hpp"

namespace {

using qlf::Complex;
using qlf::Fraction;

struct RandomProblem {
  qlf::NodeSum sum;
  std::vector<Fraction> nodes;
  std::vector<std::vector<Complex>> coeffs;
};

RandomProblem random_problem(std::mt19937_64& rng, std::size_t K, std::size_t R) {
  std::uniform_int_distribution<std::int64_t> den(1, 1 << 20);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RandomProblem p;
  p.coeffs.assign(R, std::vector<Complex>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const std::int64_t d = den(rng);
    p.nodes.push_back(qlf::reduce_fraction(std::uniform_int_distribution<std::int64_t>(0, d - 1)(rng), d));
    for (auto& row : p.coeffs) row[k] = {gauss(rng), gauss(rng)};
  }
  p.sum = qlf::NodeSum::from_dense(p.nodes, p.coeffs);
  return p;
}

TEST(Fraction, ReduceAndOrder) {
  EXPECT_EQ(qlf::reduce_fraction(6, 8), (Fraction{3, 4}));
  EXPECT_EQ(qlf::reduce_fraction(0, 8), (Fraction{0, 1}));
  EXPECT_TRUE(qlf::fraction_less({1, 3}, {1, 2}));
  EXPECT_FALSE(qlf::fraction_less({2, 4}, {1, 2}));
  // products beyond 64 bits
  EXPECT_TRUE(qlf::fraction_less({4000000000, 8000000001}, {4000000001, 8000000001}));
}

TEST(UnitPhase, ExactReduction) {
  EXPECT_LT(std::abs(qlf::unit_phase({1, 4}, 1) - Complex(0.0, 1.0)), 1e-16);
  EXPECT_LT(std::abs(qlf::unit_phase({1, 3}, 3000000000000) - Complex(1.0, 0.0)), 1e-15);
  EXPECT_LT(std::abs(qlf::unit_phase({1, 2}, -3) - Complex(-1.0, 0.0)), 1e-15);
}

TEST(NodeSum, FromDenseMergesDuplicates) {
  const std::vector<Fraction> nodes = {{1, 2}, {1, 4}, {1, 2}, {0, 1}};
  const std::vector<std::vector<Complex>> coeffs = {{1.0, 2.0, 3.0, 4.0}};
  const auto sum = qlf::NodeSum::from_dense(nodes, coeffs);
  ASSERT_EQ(sum.K(), 3u);
  EXPECT_EQ(sum.nodes()[0], (Fraction{0, 1}));
  EXPECT_EQ(sum.nodes()[2], (Fraction{1, 2}));
  EXPECT_EQ(sum.coefficient(0, 2), Complex(4.0));
  EXPECT_DOUBLE_EQ(sum.scale(), 4.0);
  EXPECT_DOUBLE_EQ(sum.l1_norm(0), 10.0);
  EXPECT_EQ(sum.raw_terms, 4u);
}

TEST(DirectEval, MatchesNaiveSum) {
  std::mt19937_64 rng(7);
  const auto p = random_problem(rng, 40, 2);
  const qlf::EvalGrid grid{-5, 30};
  const auto res = qlf::direct_eval(p.sum, grid);
  EXPECT_EQ(res.ops.direct_terms, 40u * 30u * 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::int64_t j = 0; j < grid.H; ++j) {
      // points are offsets j from b0; the b0 phase lives in the weights
      Complex shifted = 0.0;
      for (std::size_t k = 0; k < p.nodes.size(); ++k) {
        shifted += p.coeffs[r][k] * std::polar(1.0, 2.0 * std::numbers::pi * p.nodes[k].value() * static_cast<double>(j));
      }
      EXPECT_LT(std::abs(res.at(r, static_cast<std::size_t>(j)) - shifted), 1e-11) << r << ' ' << j;
    }
  }
}

TEST(DirectEval, ShiftedMovesTheWindow) {
  std::mt19937_64 rng(8);
  const auto p = random_problem(rng, 30, 1);
  const auto moved = p.sum.shifted(17);
  const auto a = qlf::direct_eval(p.sum, {0, 40});
  const auto b = qlf::direct_eval(moved, {0, 23});
  for (std::size_t j = 0; j < 23; ++j) EXPECT_LT(std::abs(a.at(0, j + 17) - b.at(0, j)), 1e-12);
}

TEST(DirectEval, PointsSubset) {
  std::mt19937_64 rng(9);
  const auto p = random_problem(rng, 25, 3);
  const auto full = qlf::direct_eval(p.sum, {0, 50});
  const std::vector<std::int64_t> pts = {3, 11, 49};
  const auto some = qlf::direct_eval_points(p.sum, pts);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(some.at(r, i), full.at(r, static_cast<std::size_t>(pts[i])));
    }
  }
}

TEST(FastEval, MatchesDirectOnRandomProblems) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> expo(4, 11);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t K = std::size_t{1} << expo(rng);
    const std::int64_t H = std::int64_t{1} << expo(rng);
    const auto p = random_problem(rng, K, 2);
    const qlf::EvalGrid grid{std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng), H};
    const double eps = 1e-9;
    const auto fast = qlf::fast_eval(p.sum, grid, eps, 2);
    const auto direct = qlf::direct_eval(p.sum, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
      worst = std::max(worst, std::abs(fast.values[i] - direct.values[i]));
    }
    EXPECT_LT(worst, eps * p.sum.scale()) << "K=" << K << " H=" << H;
  }
}

TEST(FastEval, OddAndTinyGrids) {
  std::mt19937_64 rng(11);
  const auto p = random_problem(rng, 100, 1);
  for (std::int64_t H : {1, 2, 3, 7, 101}) {
    const auto fast = qlf::fast_eval(p.sum, {5, H}, 1e-10);
    const auto direct = qlf::direct_eval(p.sum, {5, H});
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
      EXPECT_LT(std::abs(fast.values[i] - direct.values[i]), 1e-10 * p.sum.scale()) << H;
    }
  }
}

TEST(FastEval, WorkGrowsSlowerThanPointCount) {
  std::mt19937_64 rng(12);
  const auto p = random_problem(rng, 4096, 1);
  for (std::int64_t H = 16; H <= 2048; H *= 2) {
    const auto a = qlf::fast_eval(p.sum, {0, H}, 1e-9);
    const auto b = qlf::fast_eval(p.sum, {0, 2 * H}, 1e-9);
    EXPECT_LE(static_cast<double>(b.ops.total()), 2.4 * static_cast<double>(a.ops.total())) << H;
  }
}

TEST(FastEval, RefusesAccuracyBelowFloor) {
  std::mt19937_64 rng(13);
  const auto p = random_problem(rng, 64, 1);
  const double floor = qlf::fast_eval_floor(p.sum);
  EXPECT_GT(floor, 0.0);
  EXPECT_THROW(qlf::fast_eval(p.sum, {0, 64}, floor / 10.0), qlf::AccuracyError);
  EXPECT_NO_THROW(qlf::fast_eval(p.sum, {0, 64}, floor * 2.0));
  EXPECT_THROW(qlf::fast_eval(p.sum, {0, 64}, 0.0), qlf::DomainError);
}

TEST(FastEval, EmptyInputs) {
  const qlf::NodeSum empty;
  const auto res = qlf::fast_eval(empty, {0, 10}, 1e-6);
  EXPECT_EQ(res.values.size(), 0u);
}

// S_r(t, a, b) straight from the definition.
Complex brute_s(const qlf::CoefficientTable& table, std::int64_t r, std::int64_t a, std::int64_t b,
                qlf::Convention convention) {
  Complex s = 0.0;
  for (std::int64_t m = 1; m <= table.N() / a; ++m) {
    Complex term = table.at(r, a * m) * qlf::testing::gauss_sum_long(b, 2 * m);
    if (convention == qlf::Convention::sqrt_a_scaling) term /= std::sqrt(static_cast<double>(m));
    s += term;
  }
  return s;
}

TEST(NodeProblem, ReproducesDivisorSums) {
  const auto table = qlf::build_coefficient_table(0.3, 10000, 60, 3);
  const qlf::Window window{10000, 4999};
  for (auto convention : {qlf::Convention::sqrt_a_scaling, qlf::Convention::a_scaling}) {
    for (std::int64_t a : {1, 3, 7}) {
      const auto problem = qlf::build_node_problem(a, table, window, convention);
      EXPECT_EQ(problem.grid.b0, (10000 + a - 1) / a);
      EXPECT_EQ(problem.grid.H, (14998 / a) - problem.grid.b0 + 1);
      const std::int64_t M = 60 / a;
      EXPECT_EQ(problem.sum.raw_terms, static_cast<std::size_t>(2 * M * (M + 1)));
      const auto res = qlf::direct_eval(problem.sum, problem.grid);
      for (std::int64_t j : {std::int64_t{0}, std::int64_t{1}, problem.grid.H / 2, problem.grid.H - 1}) {
        const std::int64_t b = problem.grid.b0 + j;
        if (b % 2 == 0) continue;
        for (std::int64_t r = 0; r < 3; ++r) {
          const Complex expect = brute_s(table, r, a, b, convention);
          EXPECT_LT(std::abs(res.at(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) - expect),
                    1e-10 * std::max(1.0, std::abs(expect)))
              << "a=" << a << " b=" << b << " r=" << r;
        }
      }
    }
  }
}

TEST(NodeProblem, MergesRepeatedNodes) {
  const auto table = qlf::build_coefficient_table(0.0, 10000, 400, 2);
  const auto problem = qlf::build_node_problem(1, table, {10000, 4999});
  EXPECT_EQ(problem.sum.K(), 39419u);
  EXPECT_LT(problem.sum.K(), problem.sum.raw_terms);
}

TEST(NodeProblem, EmptyWhenDivisorExceedsN) {
  const auto table = qlf::build_coefficient_table(0.0, 10000, 50, 2);
  EXPECT_TRUE(qlf::build_node_problem(51, table, {10000, 4999}).empty());
  EXPECT_THROW(qlf::build_node_problem(0, table, {10000, 4999}), qlf::DomainError);
}

}  // namespace
