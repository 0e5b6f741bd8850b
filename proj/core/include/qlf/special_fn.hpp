#pragma once

// Complex special functions behind the smoothed main sum:
//
//   Gamma(z, w)   upper incomplete gamma, w^z * int_1^inf e^{-wy} y^{z-1} dy
//   G_z(w)        the kernel int_1^inf e^{-wy} y^{z-1} dy = Gamma(z, w) / w^z
//   V_z(w)        Gamma(z/2, w) / Gamma(z/2)
//   theta(t, a)   rotation phase that makes e^{i theta} L(1/2 + it) real
//
// Everything here is a pure function of its arguments.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qlf {

using Complex = std::complex<double>;

// Principal branch of log Gamma(z). Throws DomainError at the poles.
Complex log_gamma(Complex z);

// Upper incomplete gamma bound to a fixed order z. Gamma(z) is computed once at
// construction, so evaluating many w for the same z costs one series or one
// continued fraction each.
class UpperGamma {
 public:
  explicit UpperGamma(Complex z);

  Complex order() const noexcept { return z_; }
  Complex complete() const noexcept { return gamma_z_; }

  // Gamma(z, w); w > 0.
  Complex operator()(double w) const;
  // G_z(w) = Gamma(z, w) / w^z; w > 0.
  Complex kernel(double w) const;

  // Below this w the power series of the lower function is used, above it the
  // continued fraction.
  double crossover() const noexcept { return crossover_; }

 private:
  Complex lower_series_sum(double w) const;
  Complex continued_fraction(double w) const;

  Complex z_;
  Complex gamma_z_;
  double crossover_;
};

Complex incomplete_gamma_upper(Complex z, double w);
Complex g_kernel(Complex z, double w);

struct GDerivativeRow {
  Complex z;
  double w = 0.0;
  std::vector<Complex> values;  // values[r] = d^r/dw^r G_z(w) = (-1)^r G_{z+r}(w)
};

// First `count` w-derivatives of G_z at w, by the upward recursion
// G_{z+1}(w) = (e^{-w} + z G_z(w)) / w.
GDerivativeRow g_derivative_row(Complex z, double w, std::size_t count);

// The same derivatives rescaled to G^{(r)}_z(w) * w^r / r!, which stay bounded
// for every r (no w^{-r} overflow). This is the row used by the coefficient
// table.
std::vector<Complex> scaled_g_derivative_row(Complex z, double w, std::size_t count);
std::vector<Complex> scaled_g_derivative_row(const UpperGamma& gamma, double w,
                                             std::size_t count);

Complex weight_v(Complex z, double w);

// theta(t, a) = (t/2) log(q/pi) + Im log Gamma((1/2 + a + it)/2).
// Accurate for |t| <= 10; larger |t| is evaluated but the main sum itself
// suffers cancellation there.
double theta_phase(double t, int parity, double q);

// C(t, q) = (pi/q)^{1/4 + it/2} / Gamma(1/4 + it/2).
Complex c_prefactor(double t, double q);

// g(q) = exp(pi i q(q-2)/8 - pi i/8) / (2 sqrt 2) for odd q. Depends only on
// q mod 16.
Complex g_prefactor(std::int64_t q);

}  // namespace qlf
