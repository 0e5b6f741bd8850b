#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace qlf {

// Conductor window [Q, Q + Delta).
struct Window {
  std::int64_t Q = 0;
  std::int64_t Delta = 0;

  std::int64_t end() const noexcept { return Q + Delta; }  // exclusive
  bool contains(std::int64_t q) const noexcept { return q >= Q && q < end(); }
};

// Requires 1 <= Delta <= Q/2; throws ConfigError otherwise.
void validate_window(const Window& window);

// Below this Q the amortized path has no guarantees and batches are evaluated
// one character at a time.
inline constexpr std::int64_t kFastPathMinQ = 10000;

struct FactoredConductor {
  std::int64_t q = 0;
  std::vector<std::int64_t> primes;  // distinct, ascending
  std::vector<int> exponents;        // parallel to primes
  int omega = 0;
  int parity_class = 0;  // 0 when q = 1 (mod 4), else 1
  bool squarefree = false;
  bool fundamental = false;  // q > 1 squarefree, q = 1 (mod 4)

  // 2^omega for squarefree q.
  std::int64_t divisor_count() const;
};

// Factors q by trial division. Used for isolated conductors and as the test
// oracle of the sieve.
FactoredConductor factor_conductor(std::int64_t q);

using FactorTable = std::map<std::int64_t, FactoredConductor>;

// Segmented sieve over the odd q of the window: every odd q in [Q, Q+Delta) gets
// its full factorization.
FactorTable sieve_factor_window(const Window& window);

// Same, over an arbitrary range [lo, hi) without the window constraints.
FactorTable sieve_factor_range(std::int64_t lo, std::int64_t hi);

bool is_fundamental_odd_positive(const FactoredConductor& fc);

// Kronecker symbol (a / n) for n >= 1.
int kronecker(std::int64_t a, std::int64_t n);

// chi_q(n) for a positive odd fundamental discriminant q (the Kronecker symbol
// (q / n)). Throws DomainError when q is not fundamental.
int quad_character(std::int64_t q, std::int64_t n);

struct DivisorTerm {
  std::int64_t a = 1;  // product of a subset of the small primes of q
  int sign = 1;        // (-1)^{subset size}
  friend bool operator==(const DivisorTerm&, const DivisorTerm&) = default;
};

// Inclusion-exclusion terms over the primes of q that are <= N, keeping only
// subsets whose product is <= N. Always starts with (1, +1); sorted by a.
std::vector<DivisorTerm> divisor_terms(const FactoredConductor& fc, std::int64_t N);

}  // namespace qlf
