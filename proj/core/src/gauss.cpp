#include "qlf/gauss.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qlf/compensated.hpp"
#include "qlf/error.hpp"

namespace qlf {
namespace {

void require_odd(std::int64_t b, const char* what) {
  if (b < 1 || b % 2 == 0) {
    throw DomainError(std::string(what) + ": b must be odd and positive, got " +
                      std::to_string(b));
  }
}

// i^k.
Complex unit_power(std::int64_t k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

__extension__ using u128 = unsigned __int128;

// sum_{l=0}^{count-1} exp(2 pi i b l^2 / modulus), exact angle reduction.
Complex quadratic_phase_sum(std::int64_t b, std::int64_t modulus, std::int64_t count) {
  const auto mod = static_cast<u128>(modulus);
  const auto bb = static_cast<u128>(b % modulus);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(modulus);
  CompensatedComplexSum sum;
  for (std::int64_t l = 0; l < count; ++l) {
    const auto ll = static_cast<u128>(l % modulus);
    const auto k = static_cast<std::int64_t>((bb * ((ll * ll) % mod)) % mod);
    sum.add(std::polar(1.0, step * static_cast<double>(k)));
  }
  return sum.value();
}

}  // namespace

Complex gauss_sum_direct(std::int64_t b, std::int64_t n) {
  require_odd(b, "gauss_sum_direct");
  if (n < 1) throw DomainError("gauss_sum_direct: n must be positive");
  // exp(pi i b l^2 / n) = exp(2 pi i b l^2 / (2n))
  return quadratic_phase_sum(b, 2 * n, 2 * n);
}

Complex gauss_sum_fast(std::int64_t b, std::int64_t m) {
  require_odd(b, "gauss_sum_fast");
  if (m < 1) throw DomainError("gauss_sum_fast: m must be positive");
  // exp(pi i b l^2 / (2m)) = exp(2 pi i b l^2 / (4m))
  const Complex head = 4.0 * quadratic_phase_sum(b, 4 * m, m);
  const Complex tail = (b % 4 == 1) ? unit_power(m) : unit_power(3 * m);
  return head + 2.0 * (tail - 1.0);
}

Complex character_from_gauss(std::int64_t q, std::int64_t n) {
  require_odd(q, "character_from_gauss");
  if (n < 1) throw DomainError("character_from_gauss: n must be positive");
  if (std::gcd(q, n) != 1) {
    throw DomainError("character_from_gauss: gcd(n, q) > 1, the expansion does not apply");
  }
  return g_prefactor(q) * gauss_sum_fast(q, n) / std::sqrt(static_cast<double>(n));
}

}  // namespace qlf
