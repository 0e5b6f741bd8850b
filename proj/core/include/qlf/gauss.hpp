#pragma once

#include <cstdint>

#include "qlf/special_fn.hpp"

namespace qlf {

// g_b(n) = sum_{l=0}^{2n-1} exp(pi i b l^2 / n). Every angle is reduced
// exactly (b l^2 mod 2n in integers) before the trigonometric call, so the
// per-term error does not grow with b. Requires odd b >= 1 and n >= 1.
Complex gauss_sum_direct(std::int64_t b, std::int64_t n);

// g_b(2m) through the quarter-length identity
//   g_b(2m) = 4 sum_{l<m} exp(pi i b l^2 / (2m)) + 2 (i^{m} - 1)      b = 1 mod 4
//                                                 + 2 ((-i)^{m} - 1)   b = 3 mod 4
Complex gauss_sum_fast(std::int64_t b, std::int64_t m);

// chi_q(n) recovered as g(q) g_q(2n) / sqrt(n); valid for odd fundamental q and
// gcd(n, q) = 1 (DomainError otherwise).
Complex character_from_gauss(std::int64_t q, std::int64_t n);

}  // namespace qlf
