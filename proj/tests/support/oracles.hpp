#pragma once

// Reference implementations used only by the tests. Each one takes a
// different route from the library code it checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace qlf::testing {

using Cplx = std::complex<double>;
using CplxL = std::complex<long double>;

// Nodes and weights of n-point Gauss-Legendre on [-1, 1], by Newton's method on
// the three-term recurrence.
inline std::pair<std::vector<long double>, std::vector<long double>> gauss_legendre(int n) {
  std::vector<long double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    long double r = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = r;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * r * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const long double dp = n * (r * p1 - p0) / (r * r - 1.0L);
      const long double step = p1 / dp;
      r -= step;
      if (std::fabs(step) < 1e-19L) {
        x[i] = r;
        w[i] = 2.0L / ((1.0L - r * r) * dp * dp);
        break;
      }
    }
  }
  return {x, w};
}

// G_z(w) = int_1^inf e^{-wy} y^{z-1} dy by quadrature. With y = 1 + s/w the
// integral becomes (e^{-w}/w) int_0^inf e^{-s} (1 + s/w)^{z-1} ds; the panels
// grow geometrically away from the branch point s = -w.
inline Cplx g_kernel_quadrature(Cplx z, double w) {
  static const auto rule = gauss_legendre(24);
  const CplxL zl(z.real(), z.imag());
  auto f = [&](long double s) {
    return std::exp(-s) * std::pow(CplxL(1.0L + s / w), zl - 1.0L);
  };
  CplxL total = 0.0L;
  long double lo = 0.0L;
  long double width = 0.25L * w;
  while (lo < 200.0L) {
    const long double hi = lo + std::min<long double>(width, 2.0L);
    const long double mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
    for (std::size_t i = 0; i < rule.first.size(); ++i) {
      total += rule.second[i] * half * f(mid + half * rule.first[i]);
    }
    lo = hi;
    width = 0.5L * (lo + w);
  }
  const CplxL out = std::exp(-static_cast<long double>(w)) / static_cast<long double>(w) * total;
  return {static_cast<double>(out.real()), static_cast<double>(out.imag())};
}

// Gamma(z, w) = w^z G_z(w).
inline Cplx upper_gamma_quadrature(Cplx z, double w) {
  return std::pow(Cplx(w), z) * g_kernel_quadrature(z, w);
}

// Trial-division factorization: (prime, exponent) pairs ascending.
inline std::vector<std::pair<std::int64_t, int>> trial_factor(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_fundamental_odd(std::int64_t q) {
  if (q < 5 || q % 4 != 1) return false;
  for (const auto& [p, e] : trial_factor(q)) {
    if (e > 1) return false;
  }
  return true;
}

__extension__ using u128 = unsigned __int128;

inline std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
  u128 r = 1 % m;
  u128 x = static_cast<u128>(((b % m) + m) % m);
  while (e > 0) {
    if (e & 1) r = (r * x) % static_cast<u128>(m);
    x = (x * x) % static_cast<u128>(m);
    e >>= 1;
  }
  return static_cast<std::int64_t>(r);
}

// Legendre symbol (a / p) by Euler's criterion, p an odd prime.
inline int legendre_euler(std::int64_t a, std::int64_t p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

// chi_q(n) for odd fundamental q: by reciprocity (q / n) equals the Jacobi
// symbol (n / q), a product of Legendre symbols over the primes of q.
inline int character_euler(std::int64_t q, std::int64_t n) {
  int v = 1;
  for (const auto& [p, e] : trial_factor(q)) v *= legendre_euler(n, p);
  return v;
}

// g_b(n) = sum_{l<2n} exp(pi i b l^2 / n) in long double, angle reduced mod 2n.
inline Cplx gauss_sum_long(std::int64_t b, std::int64_t n) {
  const std::int64_t mod = 2 * n;
  CplxL acc = 0.0L;
  for (std::int64_t l = 0; l < mod; ++l) {
    const std::int64_t k = ((b % mod) * ((l * l) % mod)) % mod;
    const long double ang = std::numbers::pi_v<long double> * static_cast<long double>(k) /
                            static_cast<long double>(n);
    acc += CplxL(std::cos(ang), std::sin(ang));
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// sum over n <= N with gcd(n, q) = 1 of f(n), straight from the definition.
inline Cplx coprime_sum(std::int64_t q, std::int64_t N, const std::function<Cplx(std::int64_t)>& f) {
  Cplx s = 0.0;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (std::gcd(n, q) == 1) s += f(n);
  }
  return s;
}

}  // namespace qlf::testing
