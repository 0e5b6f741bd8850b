#pragma once

// Per-character evaluation of Z(t, chi_q) straight from the smoothed sum, one
// incomplete gamma value per term. This is the reference the amortized
// pipeline is checked against; it uses special_fn and arith only.

#include <cstdint>

#include "qlf/special_fn.hpp"

namespace qlf {

struct OracleResult {
  std::int64_t q = 0;
  double t = 0.0;
  double Z = 0.0;
  double theta = 0.0;
  Complex F;
  std::int64_t N_used = 0;
  double tail_bound = 0.0;  // bound on |main-sum tail| beyond N_used
  std::uint64_t special_calls = 0;
};

// Bound on sum_{n > N} |chi(n) n^{-1/2-it} V(pi n^2/q)| for this q:
// (1/2) (q/pi)^{7/4} exp(-pi N^2/q) / N^2, divided by |Gamma(1/4 + it/2)| when
// that is below 1.
double oracle_tail_bound(std::int64_t q, double t, std::int64_t N);

// Smallest N >= sqrt((2q/pi) log(q/eps1)) whose tail bound is below eps1.
std::int64_t oracle_truncation(std::int64_t q, double t, double eps1);

// F(t, chi_q) = sum_{n<=N} chi_q(n) n^{-1/2-it} V_{1/2+it}(pi n^2 / q).
Complex direct_F(std::int64_t q, double t, std::int64_t N);

// The same sum written as C(t, q) sum chi_q(n) G_{1/4+it/2}(pi n^2 / q).
Complex direct_F_kernel_form(std::int64_t q, double t, std::int64_t N);

// Z = 2 Re[e^{i theta} F] with N chosen for a tail below epsilon/8.
// Requires q fundamental (DomainError otherwise) and |t| <= 10.
OracleResult direct_Z(std::int64_t q, double t, double epsilon);

}  // namespace qlf
