#include "qlf/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qlf/arith.hpp"
#include "qlf/compensated.hpp"
#include "qlf/error.hpp"

namespace qlf {
namespace {

constexpr double kPi = std::numbers::pi;

void require_fundamental(std::int64_t q) {
  if (q < 5 || !is_fundamental_odd_positive(factor_conductor(q))) {
    throw DomainError("oracle: q = " + std::to_string(q) +
                      " is not a positive odd fundamental discriminant");
  }
}

}  // namespace

double oracle_tail_bound(std::int64_t q, double t, std::int64_t N) {
  const double qq = static_cast<double>(q);
  const double n = static_cast<double>(N);
  const double gamma_mod = std::exp(log_gamma(Complex{0.25, 0.5 * t}).real());
  return 0.5 * std::pow(qq / kPi, 1.75) * std::exp(-kPi * n * n / qq) / (n * n) /
         std::min(1.0, gamma_mod);
}

std::int64_t oracle_truncation(std::int64_t q, double t, double eps1) {
  const double qq = static_cast<double>(q);
  auto N = static_cast<std::int64_t>(std::ceil(std::sqrt((2.0 * qq / kPi) * std::log(qq / eps1))));
  // The integral comparison behind the bound needs decreasing terms.
  N = std::max(N, static_cast<std::int64_t>(std::sqrt(2.0 * qq / kPi)) + 1);
  while (oracle_tail_bound(q, t, N) >= eps1) ++N;
  return N;
}

Complex direct_F(std::int64_t q, double t, std::int64_t N) {
  const Complex s{0.5, t};
  const UpperGamma gamma(0.5 * s);
  const double base = kPi / static_cast<double>(q);
  CompensatedComplexSum sum;
  for (std::int64_t n = 1; n <= N; ++n) {
    const int chi = kronecker(q, n);
    if (chi == 0) continue;
    const double nn = static_cast<double>(n);
    const Complex v = gamma(base * nn * nn) / gamma.complete();
    sum.add(static_cast<double>(chi) * std::exp(-s * std::log(nn)) * v);
  }
  return sum.value();
}

Complex direct_F_kernel_form(std::int64_t q, double t, std::int64_t N) {
  const UpperGamma gamma(Complex{0.25, 0.5 * t});
  const double base = kPi / static_cast<double>(q);
  CompensatedComplexSum sum;
  for (std::int64_t n = 1; n <= N; ++n) {
    const int chi = kronecker(q, n);
    if (chi == 0) continue;
    const double nn = static_cast<double>(n);
    sum.add(static_cast<double>(chi) * gamma.kernel(base * nn * nn));
  }
  return c_prefactor(t, static_cast<double>(q)) * sum.value();
}

OracleResult direct_Z(std::int64_t q, double t, double epsilon) {
  require_fundamental(q);
  if (std::abs(t) > 10.0) throw DomainError("direct_Z: |t| must not exceed 10");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("direct_Z: epsilon must lie in (0, 1)");
  OracleResult res;
  res.q = q;
  res.t = t;
  const double eps1 = epsilon / 8.0;
  res.N_used = oracle_truncation(q, t, eps1);
  res.tail_bound = oracle_tail_bound(q, t, res.N_used);
  res.F = direct_F(q, t, res.N_used);
  res.theta = theta_phase(t, 0, static_cast<double>(q));
  res.Z = 2.0 * (std::polar(1.0, res.theta) * res.F).real();
  res.special_calls = static_cast<std::uint64_t>(res.N_used);
  return res;
}

}  // namespace qlf
