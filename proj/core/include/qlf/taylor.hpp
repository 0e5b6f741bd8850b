#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "qlf/special_fn.hpp"

namespace qlf {

// Supported precision: log2(Q / epsilon) must not exceed this in double
// arithmetic.
inline constexpr double kMaxLog2QOverEpsilon = 45.0;

struct ErrorBudget {
  std::int64_t Q = 0;
  std::int64_t Delta = 0;
  double epsilon = 0.0;
  double epsilon1 = 0.0;  // main-sum truncation
  double epsilon2 = 0.0;  // Taylor truncation
  double epsilon3 = 0.0;  // multi-evaluation
  std::int64_t N = 0;     // main-sum length
  std::int64_t R = 0;     // Taylor terms
};

// Smallest N and R meeting the truncation bounds for the window, with
// epsilon1 = epsilon2 = epsilon/8 and epsilon3 = epsilon / (4 R N sqrt(Q)).
// Requires 1 <= Delta < Q and 0 < epsilon < 1 (ConfigError) and
// log2(Q/epsilon) <= 45 (AccuracyError). For |t| > 1 the truncation N is enlarged by the
// factor 1/|Gamma(1/4 + it/2)| that the bounds assume to be <= 1.
ErrorBudget plan_budget(std::int64_t Q, std::int64_t Delta, double epsilon, double t);

// (1/2) (2Q/pi)^{7/4} exp(-pi N^2 / (2Q)) / N^2: bound on the main-sum tail for
// every q < 2Q. Requires Q >= 10^4 and N > sqrt(2Q/pi).
double tail_bound(std::int64_t N, std::int64_t Q);

// (2 sqrt(N) / R) (pi/Q)^{1/4} (Delta/Q)^R: bound on the Taylor truncation
// error over the window. Requires 0 <= Delta < Q and R >= 1.
double taylor_remainder_bound(std::int64_t N, std::int64_t Q, std::int64_t Delta,
                              std::int64_t R);

// c_r(t, n) = G^{(r)}_{1/4+it/2}(pi n^2 / Q) / r! * (pi n^2 / Q)^r for r < R,
// 1 <= n <= N.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  CoefficientTable(double t, std::int64_t Q, std::int64_t N, std::int64_t R,
                   std::vector<Complex> values);

  double t() const noexcept { return t_; }
  std::int64_t Q() const noexcept { return Q_; }
  std::int64_t N() const noexcept { return N_; }
  std::int64_t R() const noexcept { return R_; }

  Complex at(std::int64_t r, std::int64_t n) const {
    return values_[static_cast<std::size_t>(r * N_ + (n - 1))];
  }
  const std::vector<Complex>& values() const noexcept { return values_; }

  // Kernel evaluations and derivative entries produced while building.
  std::uint64_t kernel_evaluations = 0;
  std::uint64_t derivative_entries = 0;

 private:
  double t_ = 0.0;
  std::int64_t Q_ = 0;
  std::int64_t N_ = 0;
  std::int64_t R_ = 0;
  std::vector<Complex> values_;  // row-major, R rows of N
};

CoefficientTable build_coefficient_table(double t, std::int64_t Q, std::int64_t N,
                                         std::int64_t R, unsigned threads = 1);

// Cache file: six little-endian 64-bit header fields
//   magic, version, t (IEEE-754 bits), Q, N, R
// followed by R*N (re, im) pairs of little-endian doubles, row-major.
inline constexpr std::uint64_t kCoefficientMagic = 0x3146454f43464c51ull;  // "QLFCOEF1"
inline constexpr std::uint64_t kCoefficientVersion = 1;

void write_coefficient_table(const std::filesystem::path& path, const CoefficientTable& table);
CoefficientTable read_coefficient_table(const std::filesystem::path& path);

// File name used inside a cache directory for the given parameters.
std::filesystem::path coefficient_cache_path(const std::filesystem::path& dir, double t,
                                             std::int64_t Q, std::int64_t N, std::int64_t R);

// Loads the table from `dir` when a matching file exists, otherwise builds it
// and stores it there. `hit` reports which happened.
CoefficientTable load_or_build_coefficient_table(const std::filesystem::path& dir, double t,
                                                 std::int64_t Q, std::int64_t N,
                                                 std::int64_t R, unsigned threads,
                                                 bool* hit = nullptr);

}  // namespace qlf
