#include "qlf/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qlf/error.hpp"

namespace qlf {
namespace {

constexpr std::int64_t kMaxBlock = std::int64_t{1} << 20;

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::int64_t> small_odd_primes(std::int64_t limit) {
  std::vector<std::int64_t> primes;
  if (limit < 3) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit + 1), false);
  for (std::int64_t p = 3; p <= limit; p += 2) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::int64_t m = p * p; m <= limit; m += 2 * p) composite[m] = true;
  }
  return primes;
}

void classify(FactoredConductor& fc) {
  fc.omega = static_cast<int>(fc.primes.size());
  fc.squarefree = std::all_of(fc.exponents.begin(), fc.exponents.end(),
                              [](int e) { return e == 1; });
  fc.parity_class = (fc.q % 4 == 1) ? 0 : 1;
  fc.fundamental = fc.q > 1 && fc.q % 4 == 1 && fc.squarefree;
}

}  // namespace

void validate_window(const Window& window) {
  if (window.Delta < 1) {
    throw ConfigError("window width must be >= 1, got " + std::to_string(window.Delta));
  }
  if (2 * window.Delta > window.Q) {
    throw ConfigError("window width must satisfy 1 <= Delta <= Q/2 (got Q = " +
                      std::to_string(window.Q) + ", Delta = " +
                      std::to_string(window.Delta) + ")");
  }
}

std::int64_t FactoredConductor::divisor_count() const {
  std::int64_t d = 1;
  for (int e : exponents) d *= (e + 1);
  return d;
}

FactoredConductor factor_conductor(std::int64_t q) {
  if (q < 1) throw DomainError("factor_conductor: q must be positive");
  FactoredConductor fc;
  fc.q = q;
  std::int64_t rest = q;
  for (std::int64_t p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    fc.primes.push_back(p);
    fc.exponents.push_back(e);
  }
  if (rest > 1) {
    fc.primes.push_back(rest);
    fc.exponents.push_back(1);
  }
  classify(fc);
  return fc;
}

FactorTable sieve_factor_range(std::int64_t lo, std::int64_t hi) {
  FactorTable table;
  if (lo < 1) lo = 1;
  if (hi <= lo) return table;
  const std::int64_t first = (lo % 2 == 1) ? lo : lo + 1;
  if (first >= hi) return table;
  const auto primes = small_odd_primes(isqrt(hi - 1));
  const std::int64_t odd_count = (hi - first + 1) / 2;
  const std::int64_t block = std::min(odd_count, kMaxBlock);

  // Allocation failure surfaces as std::bad_alloc.
  std::vector<std::int64_t> residual(static_cast<std::size_t>(block));
  std::vector<FactoredConductor> entries(static_cast<std::size_t>(block));

  for (std::int64_t start = 0; start < odd_count; start += block) {
    const std::int64_t len = std::min(block, odd_count - start);
    const std::int64_t base = first + 2 * start;  // value at slot 0
    for (std::int64_t i = 0; i < len; ++i) {
      residual[i] = base + 2 * i;
      entries[i] = FactoredConductor{};
      entries[i].q = base + 2 * i;
    }
    for (std::int64_t p : primes) {
      // First odd multiple of p that is >= base.
      std::int64_t m = ((base + p - 1) / p) * p;
      if (m % 2 == 0) m += p;
      for (std::int64_t v = m; v < base + 2 * len; v += 2 * p) {
        const std::int64_t i = (v - base) / 2;
        int e = 0;
        while (residual[i] % p == 0) {
          residual[i] /= p;
          ++e;
        }
        entries[i].primes.push_back(p);
        entries[i].exponents.push_back(e);
      }
    }
    for (std::int64_t i = 0; i < len; ++i) {
      FactoredConductor& fc = entries[i];
      if (residual[i] > 1) {
        fc.primes.push_back(residual[i]);
        fc.exponents.push_back(1);
      }
      classify(fc);
      table.emplace_hint(table.end(), fc.q, std::move(fc));
    }
  }
  return table;
}

FactorTable sieve_factor_window(const Window& window) {
  validate_window(window);
  return sieve_factor_range(window.Q, window.end());
}

bool is_fundamental_odd_positive(const FactoredConductor& fc) {
  return fc.q > 1 && fc.q % 2 == 1 && fc.q % 4 == 1 && fc.squarefree;
}

int kronecker(std::int64_t a, std::int64_t n) {
  if (n < 1) throw DomainError("kronecker: n must be positive");
  int result = 1;
  // (a / 2) = 0 for even a, +1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8).
  while (n % 2 == 0) {
    n /= 2;
    const std::int64_t r = ((a % 8) + 8) % 8;
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol (a / n) for odd n by binary reduction.
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

int quad_character(std::int64_t q, std::int64_t n) {
  if (q < 5 || !is_fundamental_odd_positive(factor_conductor(q))) {
    throw DomainError("quad_character: q = " + std::to_string(q) +
                      " is not a positive odd fundamental discriminant");
  }
  if (n < 1) throw DomainError("quad_character: n must be positive");
  return kronecker(q, n);
}

std::vector<DivisorTerm> divisor_terms(const FactoredConductor& fc, std::int64_t N) {
  std::vector<std::int64_t> small;
  for (std::int64_t p : fc.primes) {
    if (p <= N) small.push_back(p);
  }
  std::vector<DivisorTerm> terms{{1, 1}};
  // Extend every existing subset by each prime in turn; products beyond N are
  // dropped (their sums are empty).
  for (std::int64_t p : small) {
    const std::size_t existing = terms.size();
    for (std::size_t i = 0; i < existing; ++i) {
      if (terms[i].a <= N / p) terms.push_back({terms[i].a * p, -terms[i].sign});
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const DivisorTerm& x, const DivisorTerm& y) { return x.a < y.a; });
  return terms;
}

}  // namespace qlf
