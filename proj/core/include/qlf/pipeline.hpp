#pragma once

// Batch evaluation of Z(t, chi_q) for every positive odd fundamental q in a
// window: sieve, budget, coefficient table, one multi-evaluation per divisor a,
// then per-q recovery through inclusion-exclusion and the Taylor sum.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlf/arith.hpp"
#include "qlf/multieval.hpp"
#include "qlf/taylor.hpp"

namespace qlf {

enum class Method { fast, direct, compare };

const char* method_name(Method m) noexcept;

struct BatchRequest {
  Window window;
  double t = 0.0;
  double epsilon = 1e-6;
  Method method = Method::fast;
  Convention convention = Convention::sqrt_a_scaling;
  unsigned threads = 1;
  std::optional<std::filesystem::path> cache_dir;
};

// S_r(t, a, b) for one divisor a and b on its grid.
struct STableEntry {
  std::int64_t a = 0;
  std::int64_t b0 = 0;
  std::int64_t H = 0;
  std::size_t R = 0;
  std::vector<Complex> values;  // R x H
  std::vector<bool> present;    // per b; the direct method fills only consumed b
  double abs_error = 0.0;       // bound on |computed - exact| per entry
  bool transform = false;       // fast_eval (true) or direct summation
  std::size_t nodes = 0;
  std::size_t raw_terms = 0;
  MultiEvalOps ops;

  bool has(std::int64_t b) const;
  Complex at(std::size_t r, std::int64_t b) const;
};

struct STable {
  std::map<std::int64_t, STableEntry> entries;
  const STableEntry* find(std::int64_t a) const;
};

// Inclusion-exclusion terms of every fundamental q and, per divisor a, the
// points b = q/a that recovery will read.
struct DivisorPlan {
  std::map<std::int64_t, std::vector<DivisorTerm>> terms;     // by q
  std::map<std::int64_t, std::vector<std::int64_t>> consumers;  // by a, ascending b
};

DivisorPlan plan_divisors(const FactorTable& factors, std::int64_t N);

// Divisors a that occur in some inclusion-exclusion term; always contains 1
// when the window has a fundamental q.
std::vector<std::int64_t> realized_divisors(const FactorTable& factors, std::int64_t N);

// Problems with K H R at or below this are summed directly even in fast mode.
inline constexpr std::uint64_t kDirectCrossover = std::uint64_t{1} << 22;

STable compute_s_tables(const BatchRequest& request, const ErrorBudget& budget,
                        const CoefficientTable& table, const DivisorPlan& plan,
                        Method method);

struct AssembledF {
  Complex F;
  double error = 0.0;  // contribution of S-table errors to |F - F_exact|
  double amplification = 0.0;  // sum over terms of sqrt(a) (a under a_scaling)
  std::uint64_t ops = 0;
  std::size_t terms = 0;
};

// F(t,q) = C(t,q) g(q) sum_{r<R} ((Q-q)/q)^r sum_terms sign * sqrt(a) * S_r(t, a, q/a).
AssembledF assemble_F(const FactoredConductor& fc, const std::vector<DivisorTerm>& terms,
                      const STable& s, const ErrorBudget& budget, double t,
                      Convention convention = Convention::sqrt_a_scaling);

// 2 Re[e^{i theta} F].
double compute_Z(Complex F, double theta);

struct BatchRecord {
  std::int64_t q = 0;
  double t = 0.0;
  double Z = 0.0;
  double theta = 0.0;
  double error_bound = 0.0;
  Complex F;
  std::uint64_t recovery_ops = 0;
  std::int64_t divisor_count = 0;  // d(q)
  std::size_t terms = 0;
};

struct BatchResult {
  std::vector<BatchRecord> records;
  ErrorBudget budget;
  std::string method;  // "fast", "direct", "compare" or "oracle"
  bool oracle_route = false;
  std::size_t realized_divisors = 0;
  bool cache_hit = false;

  std::uint64_t sieve_ops = 0;
  std::uint64_t coefficient_ops = 0;
  std::uint64_t node_build_ops = 0;
  MultiEvalOps multieval_ops;
  std::uint64_t recovery_ops = 0;
  std::uint64_t precompute_ops() const noexcept {
    return sieve_ops + coefficient_ops + node_build_ops + multieval_ops.total();
  }

  double precompute_seconds = 0.0;
  double recovery_seconds = 0.0;
  double wall_seconds = 0.0;

  // compare method only
  std::optional<double> max_deviation_direct;
  std::optional<double> mean_deviation_direct;
  std::optional<double> max_deviation_oracle;
  std::optional<double> mean_deviation_oracle;
};

// Validates the request (ConfigError), then evaluates. Windows with
// Q < 10^4 are evaluated one character at a time by the oracle.
BatchResult run_batch(const BatchRequest& request);

}  // namespace qlf
