#include "qlf/taylor.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "qlf/arith.hpp"
#include "qlf/error.hpp"
#include "qlf/parallel.hpp"

namespace qlf {
namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t ceil_to_int(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw IoError("coefficient cache: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

ErrorBudget plan_budget(std::int64_t Q, std::int64_t Delta, double epsilon, double t) {
  if (Q < 2 || Delta < 1 || Delta >= Q) {
    throw ConfigError("budget needs 1 <= Delta < Q (got Q = " + std::to_string(Q) +
                      ", Delta = " + std::to_string(Delta) + ")");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  const double log2_ratio = std::log2(static_cast<double>(Q) / epsilon);
  if (log2_ratio > kMaxLog2QOverEpsilon) {
    std::ostringstream msg;
    msg << "log2(Q/epsilon) = " << log2_ratio << " exceeds the double-precision limit of "
        << kMaxLog2QOverEpsilon << "; raise epsilon or lower Q";
    throw AccuracyError(msg.str(), static_cast<double>(Q) / std::exp2(kMaxLog2QOverEpsilon));
  }

  ErrorBudget b;
  b.Q = Q;
  b.Delta = Delta;
  b.epsilon = epsilon;
  b.epsilon1 = epsilon / 8.0;
  b.epsilon2 = epsilon / 8.0;

  const double q = static_cast<double>(Q);
  // The truncation bounds use |Gamma(1/4 + it/2)| >= 1, true for |t| <= 1.
  const double gamma_mod = std::exp(log_gamma(Complex{0.25, 0.5 * t}).real());
  const double eps1_eff = b.epsilon1 * std::min(1.0, gamma_mod);
  b.N = ceil_to_int(std::sqrt((2.0 * q / kPi) * std::log(q / eps1_eff)));
  const double n_floor = std::sqrt(2.0 * q / kPi);
  if (!(static_cast<double>(b.N) > n_floor)) b.N = static_cast<std::int64_t>(n_floor) + 1;

  b.R = ceil_to_int(std::log(static_cast<double>(b.N) / b.epsilon2) /
                    std::log(q / static_cast<double>(Delta)));
  if (b.R < 1) b.R = 1;
  b.epsilon3 = epsilon / (4.0 * static_cast<double>(b.R) * static_cast<double>(b.N) * std::sqrt(q));
  return b;
}

double tail_bound(std::int64_t N, std::int64_t Q) {
  const double q = static_cast<double>(Q);
  const double n = static_cast<double>(N);
  if (Q < kFastPathMinQ) throw DomainError("tail_bound: requires Q >= 10^4");
  if (!(n > std::sqrt(2.0 * q / kPi))) throw DomainError("tail_bound: requires N > sqrt(2Q/pi)");
  const double two_q = 2.0 * q;
  return 0.5 * std::pow(two_q / kPi, 1.75) * std::exp(-kPi * n * n / two_q) / (n * n);
}

double taylor_remainder_bound(std::int64_t N, std::int64_t Q, std::int64_t Delta,
                              std::int64_t R) {
  if (Delta < 0 || Delta >= Q) throw DomainError("taylor_remainder_bound: requires 0 <= Delta < Q");
  if (R < 1) throw DomainError("taylor_remainder_bound: requires R >= 1");
  const double q = static_cast<double>(Q);
  const double r = static_cast<double>(R);
  return (2.0 * std::sqrt(static_cast<double>(N)) / r) * std::pow(kPi / q, 0.25) *
         std::pow(static_cast<double>(Delta) / q, r);
}

CoefficientTable::CoefficientTable(double t, std::int64_t Q, std::int64_t N, std::int64_t R,
                                   std::vector<Complex> values)
    : t_(t), Q_(Q), N_(N), R_(R), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(N * R)) {
    throw ConsistencyError("coefficient table: value count does not match R*N");
  }
}

CoefficientTable build_coefficient_table(double t, std::int64_t Q, std::int64_t N,
                                         std::int64_t R, unsigned threads) {
  if (Q < 1 || N < 1 || R < 1) throw DomainError("build_coefficient_table: Q, N, R must be positive");
  const UpperGamma gamma(Complex{0.25, 0.5 * t});
  const double base = kPi / static_cast<double>(Q);
  std::vector<Complex> values(static_cast<std::size_t>(N * R));
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t i) {
    const auto n = static_cast<double>(i + 1);
    const auto row = scaled_g_derivative_row(gamma, base * n * n, static_cast<std::size_t>(R));
    for (std::int64_t r = 0; r < R; ++r) {
      values[static_cast<std::size_t>(r * N) + i] = row[static_cast<std::size_t>(r)];
    }
  });
  CoefficientTable table(t, Q, N, R, std::move(values));
  table.kernel_evaluations = static_cast<std::uint64_t>(N);
  table.derivative_entries = static_cast<std::uint64_t>(N * R);
  return table;
}

void write_coefficient_table(const std::filesystem::path& path, const CoefficientTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  put_u64(out, kCoefficientMagic);
  put_u64(out, kCoefficientVersion);
  put_u64(out, std::bit_cast<std::uint64_t>(table.t()));
  put_u64(out, static_cast<std::uint64_t>(table.Q()));
  put_u64(out, static_cast<std::uint64_t>(table.N()));
  put_u64(out, static_cast<std::uint64_t>(table.R()));
  for (const Complex& c : table.values()) {
    put_u64(out, std::bit_cast<std::uint64_t>(c.real()));
    put_u64(out, std::bit_cast<std::uint64_t>(c.imag()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

CoefficientTable read_coefficient_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (get_u64(in) != kCoefficientMagic) throw IoError(path.string() + ": bad magic");
  if (get_u64(in) != kCoefficientVersion) throw IoError(path.string() + ": unsupported version");
  const double t = std::bit_cast<double>(get_u64(in));
  const auto Q = static_cast<std::int64_t>(get_u64(in));
  const auto N = static_cast<std::int64_t>(get_u64(in));
  const auto R = static_cast<std::int64_t>(get_u64(in));
  if (Q < 1 || N < 1 || R < 1 || N > (std::int64_t{1} << 32) || R > 4096) {
    throw IoError(path.string() + ": implausible header");
  }
  std::vector<Complex> values(static_cast<std::size_t>(N * R));
  for (Complex& c : values) {
    const double re = std::bit_cast<double>(get_u64(in));
    const double im = std::bit_cast<double>(get_u64(in));
    c = {re, im};
  }
  return CoefficientTable(t, Q, N, R, std::move(values));
}

std::filesystem::path coefficient_cache_path(const std::filesystem::path& dir, double t,
                                             std::int64_t Q, std::int64_t N, std::int64_t R) {
  std::ostringstream name;
  name << "coeff_t" << std::hex << std::bit_cast<std::uint64_t>(t) << std::dec << "_Q" << Q
       << "_N" << N << "_R" << R << ".bin";
  return dir / name.str();
}

CoefficientTable load_or_build_coefficient_table(const std::filesystem::path& dir, double t,
                                                 std::int64_t Q, std::int64_t N,
                                                 std::int64_t R, unsigned threads,
                                                 bool* hit) {
  const auto path = coefficient_cache_path(dir, t, Q, N, R);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    CoefficientTable table = read_coefficient_table(path);
    if (table.t() == t && table.Q() == Q && table.N() == N && table.R() == R) {
      if (hit) *hit = true;
      return table;
    }
  }
  if (hit) *hit = false;
  CoefficientTable table = build_coefficient_table(t, Q, N, R, threads);
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create cache directory " + dir.string() + ": " + ec.message());
  write_coefficient_table(path, table);
  return table;
}

}  // namespace qlf
