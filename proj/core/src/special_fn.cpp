#include "qlf/special_fn.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qlf/error.hpp"

namespace qlf {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTiny = 1e-300;
constexpr double kSeriesEps = 1e-17;
constexpr int kMaxIterations = 20000;

// B_{2k} / (2k (2k-1)) for k = 1..8.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
};

// Stirling series needs |z| >= this for full double accuracy with 8 terms.
constexpr double kStirlingRadius = 15.0;

Complex stirling(Complex z) {
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex corr = 0.0;
  Complex power = inv;
  for (double coeff : kStirling) {
    corr += coeff * power;
    power *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + corr;
}

bool is_pole(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

void require_positive(double w, const char* what) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw DomainError(std::string(what) + ": w must be positive and finite, got " +
                      std::to_string(w));
  }
}

}  // namespace

Complex log_gamma(Complex z) {
  if (is_pole(z)) {
    throw DomainError("log_gamma: pole at z = " + std::to_string(z.real()));
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("log_gamma: non-finite argument");
  }
  // Shift upwards until Stirling is accurate; each log(z + k) uses the
  // principal branch, which yields the branch of log Gamma that is continuous
  // off the negative real axis.
  Complex shift = 0.0;
  Complex x = z;
  while (std::abs(x) < kStirlingRadius) {
    shift += std::log(x);
    x += 1.0;
  }
  return stirling(x) - shift;
}

UpperGamma::UpperGamma(Complex z)
    : z_(z), gamma_z_(std::exp(log_gamma(z))), crossover_(std::abs(z) + 1.0) {}

Complex UpperGamma::lower_series_sum(double w) const {
  // sum_{k>=0} w^k / (z (z+1) ... (z+k))
  Complex term = 1.0 / z_;
  Complex sum = term;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= w / (z_ + static_cast<double>(k));
    sum += term;
    if (std::abs(term) < kSeriesEps * std::abs(sum)) return sum;
  }
  throw AccuracyError("incomplete gamma series failed to converge", kSeriesEps);
}

Complex UpperGamma::continued_fraction(double w) const {
  // Modified Lentz evaluation of
  //   Gamma(z, w) = e^{-w} w^z / (w + 1 - z - 1(1-z)/(w + 3 - z - 2(2-z)/(...)))
  // returned without the e^{-w} w^z factor.
  Complex b = w + 1.0 - z_;
  Complex c = 1.0 / kTiny;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const Complex an = -static_cast<double>(i) * (static_cast<double>(i) - z_);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const Complex delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kSeriesEps) return h;
  }
  throw AccuracyError("incomplete gamma continued fraction failed to converge", kSeriesEps);
}

Complex UpperGamma::operator()(double w) const {
  require_positive(w, "incomplete_gamma_upper");
  const Complex w_pow_z = std::exp(z_ * std::log(w));
  if (w < crossover_) {
    return gamma_z_ - w_pow_z * std::exp(-w) * lower_series_sum(w);
  }
  return std::exp(-w) * w_pow_z * continued_fraction(w);
}

Complex UpperGamma::kernel(double w) const {
  require_positive(w, "g_kernel");
  if (w < crossover_) {
    const Complex w_pow_minus_z = std::exp(-z_ * std::log(w));
    return gamma_z_ * w_pow_minus_z - std::exp(-w) * lower_series_sum(w);
  }
  return std::exp(-w) * continued_fraction(w);
}

Complex incomplete_gamma_upper(Complex z, double w) {
  require_positive(w, "incomplete_gamma_upper");
  return UpperGamma(z)(w);
}

Complex g_kernel(Complex z, double w) {
  require_positive(w, "g_kernel");
  return UpperGamma(z).kernel(w);
}

GDerivativeRow g_derivative_row(Complex z, double w, std::size_t count) {
  require_positive(w, "g_derivative_row");
  if (count == 0) throw DomainError("g_derivative_row: need at least one derivative");
  GDerivativeRow row{z, w, {}};
  row.values.resize(count);
  const double decay = std::exp(-w);
  Complex g = g_kernel(z, w);  // G_{z+r}(w)
  double sign = 1.0;
  for (std::size_t r = 0; r < count; ++r) {
    row.values[r] = sign * g;
    g = (decay + (z + static_cast<double>(r)) * g) / w;
    sign = -sign;
  }
  return row;
}

std::vector<Complex> scaled_g_derivative_row(const UpperGamma& gamma, double w,
                                             std::size_t count) {
  require_positive(w, "scaled_g_derivative_row");
  if (count == 0) throw DomainError("scaled_g_derivative_row: need at least one derivative");
  // u_r = G_{z+r}(w) w^r / r! obeys
  //   u_{r+1} = (e^{-w} w^r / r! + (z + r) u_r) / (r + 1),
  // and the Poisson weight e^{-w} w^r / r! never overflows.
  const Complex z = gamma.order();
  std::vector<Complex> out(count);
  Complex u = gamma.kernel(w);
  double poisson = std::exp(-w);
  double sign = 1.0;
  for (std::size_t r = 0; r < count; ++r) {
    out[r] = sign * u;
    const double next = static_cast<double>(r + 1);
    u = (poisson + (z + static_cast<double>(r)) * u) / next;
    poisson *= w / next;
    sign = -sign;
  }
  return out;
}

std::vector<Complex> scaled_g_derivative_row(Complex z, double w, std::size_t count) {
  return scaled_g_derivative_row(UpperGamma(z), w, count);
}

Complex weight_v(Complex z, double w) {
  require_positive(w, "weight_v");
  const UpperGamma gamma(0.5 * z);
  return gamma(w) / gamma.complete();
}

double theta_phase(double t, int parity, double q) {
  if (parity != 0 && parity != 1) throw DomainError("theta_phase: parity must be 0 or 1");
  if (!(q >= 1.0)) throw DomainError("theta_phase: conductor must be >= 1");
  const Complex half_s{0.25 + 0.5 * parity, 0.5 * t};
  return 0.5 * t * std::log(q / kPi) + log_gamma(half_s).imag();
}

Complex c_prefactor(double t, double q) {
  if (!(q >= 1.0)) throw DomainError("c_prefactor: conductor must be >= 1");
  const Complex z{0.25, 0.5 * t};
  return std::exp(z * std::log(kPi / q) - log_gamma(z));
}

Complex g_prefactor(std::int64_t q) {
  if (q % 2 == 0) throw DomainError("g_prefactor: conductor must be odd");
  // q(q-2)/8 - 1/8 = ((q-1)^2 - 2)/8, and the exponent of e^{pi i k/8} only
  // matters mod 16.
  const std::int64_t r = ((q % 16) + 16) % 16;
  const std::int64_t k = (((r * (r - 2) - 1) % 16) + 16) % 16;
  return std::polar(1.0 / (2.0 * std::numbers::sqrt2), kPi * static_cast<double>(k) / 8.0);
}

}  // namespace qlf
