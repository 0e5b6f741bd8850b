#include "qlf/multieval.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "qlf/compensated.hpp"
#include "qlf/error.hpp"
#include "qlf/parallel.hpp"

namespace qlf {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

__extension__ using i128 = __int128;

// In-place backward (exp(+2 pi i jk/n)) transform. Plans are created once per
// length under a lock; executing a plan on fresh arrays is thread-safe.
class BackwardFft {
 public:
  static void run(Complex* data, std::size_t n) {
    fftw_plan plan = instance().plan_for(static_cast<int>(n));
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, ptr, ptr);
  }

 private:
  static BackwardFft& instance() {
    static BackwardFft cache;
    return cache;
  }

  fftw_plan plan_for(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> scratch(static_cast<std::size_t>(n));
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan =
        fftw_plan_dft_1d(n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW could not plan length " + std::to_string(n));
    plans_.emplace(n, plan);
    return plan;
  }

  ~BackwardFft() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

// Smallest 2^a 3^b 5^c >= n.
std::int64_t next_smooth(std::int64_t n) {
  for (std::int64_t m = std::max<std::int64_t>(n, 1);; ++m) {
    std::int64_t r = m;
    for (std::int64_t p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

struct RawTerm {
  double key;
  Fraction node;
  std::uint32_t column;
  double weight;
};

}  // namespace

Fraction reduce_fraction(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw DomainError("reduce_fraction: denominator must be positive");
  num = floor_mod(num, den);
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

bool fraction_less(const Fraction& x, const Fraction& y) noexcept {
  return static_cast<i128>(x.num) * y.den < static_cast<i128>(y.num) * x.den;
}

Complex unit_phase(const Fraction& alpha, std::int64_t h) {
  const i128 k = (static_cast<i128>(alpha.num) * h) % alpha.den;
  const auto kk = static_cast<std::int64_t>(k < 0 ? k + alpha.den : k);
  return std::polar(1.0, kTwoPi * static_cast<double>(kk) / static_cast<double>(alpha.den));
}

NodeSum::NodeSum(std::vector<Fraction> nodes, std::vector<std::size_t> offsets,
                 std::vector<Contribution> contributions, std::size_t rows,
                 std::size_t columns, std::vector<Complex> basis)
    : nodes_(std::move(nodes)),
      offsets_(std::move(offsets)),
      contributions_(std::move(contributions)),
      rows_(rows),
      columns_(columns),
      basis_(std::move(basis)) {
  if (offsets_.size() != nodes_.size() + 1 || offsets_.back() != contributions_.size()) {
    throw ConsistencyError("NodeSum: offsets do not match contributions");
  }
  if (basis_.size() != rows_ * columns_) throw ConsistencyError("NodeSum: basis has wrong size");
  for (std::size_t k = 1; k < nodes_.size(); ++k) {
    if (!fraction_less(nodes_[k - 1], nodes_[k])) {
      throw ConsistencyError("NodeSum: nodes must be strictly increasing");
    }
  }
  compute_norms();
}

void NodeSum::compute_norms() {
  scale_ = 0.0;
  max_l1_ = 0.0;
  l1_.assign(rows_, 0.0);
  std::vector<Complex> row(rows_);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    coefficient_rows(k, 0, rows_, row.data());
    for (std::size_t r = 0; r < rows_; ++r) {
      const double mag = std::sqrt(std::norm(row[r]));
      l1_[r] += mag;
      scale_ = std::max(scale_, mag);
    }
  }
  for (double l1 : l1_) max_l1_ = std::max(max_l1_, l1);
}

NodeSum NodeSum::from_dense(std::span<const Fraction> nodes,
                            const std::vector<std::vector<Complex>>& coeffs) {
  const std::size_t raw = nodes.size();
  for (const auto& row : coeffs) {
    if (row.size() != raw) throw DomainError("from_dense: coefficient row length != node count");
  }
  std::vector<std::size_t> order(raw);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Fraction> reduced(raw);
  for (std::size_t i = 0; i < raw; ++i) reduced[i] = reduce_fraction(nodes[i].num, nodes[i].den);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return fraction_less(reduced[x], reduced[y]);
  });

  std::vector<Fraction> merged;
  std::vector<std::size_t> offsets{0};
  std::vector<Contribution> contributions;
  for (std::size_t i : order) {
    if (merged.empty() || !(merged.back() == reduced[i])) {
      if (!merged.empty()) offsets.push_back(contributions.size());
      merged.push_back(reduced[i]);
    }
    contributions.push_back({static_cast<std::uint32_t>(i), Complex{1.0, 0.0}});
  }
  offsets.push_back(contributions.size());
  if (merged.empty()) offsets = {0};

  std::vector<Complex> basis;
  basis.reserve(coeffs.size() * raw);
  for (const auto& row : coeffs) basis.insert(basis.end(), row.begin(), row.end());
  NodeSum sum(std::move(merged), std::move(offsets), std::move(contributions), coeffs.size(),
              raw, std::move(basis));
  sum.raw_terms = raw;
  return sum;
}

Complex NodeSum::coefficient(std::size_t r, std::size_t k) const {
  const Complex* row = basis_.data() + r * columns_;
  Complex acc = 0.0;
  for (std::size_t e = offsets_[k]; e < offsets_[k + 1]; ++e) {
    acc += contributions_[e].weight * row[contributions_[e].column];
  }
  return acc;
}

void NodeSum::coefficient_rows(std::size_t k, std::size_t r_lo, std::size_t r_hi,
                               Complex* out) const {
  std::fill(out, out + (r_hi - r_lo), Complex{});
  for (std::size_t e = offsets_[k]; e < offsets_[k + 1]; ++e) {
    const Complex w = contributions_[e].weight;
    const Complex* col = basis_.data() + contributions_[e].column;
    for (std::size_t r = r_lo; r < r_hi; ++r) out[r - r_lo] += w * col[r * columns_];
  }
}

std::vector<Complex> NodeSum::coefficients(std::size_t r) const {
  std::vector<Complex> out(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) out[k] = coefficient(r, k);
  return out;
}

NodeSum NodeSum::shifted(std::int64_t delta) const {
  NodeSum copy = *this;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Complex phase = unit_phase(nodes_[k], delta);
    for (std::size_t e = offsets_[k]; e < offsets_[k + 1]; ++e) copy.contributions_[e].weight *= phase;
  }
  copy.compute_norms();
  return copy;
}

NodeProblem build_node_problem(std::int64_t a, const CoefficientTable& table,
                               const Window& window, Convention convention) {
  NodeProblem problem;
  if (a < 1) throw DomainError("build_node_problem: a must be positive");
  const std::int64_t N = table.N();
  const std::int64_t b0 = (window.Q + a - 1) / a;
  const std::int64_t b_last = (window.end() - 1) / a;
  problem.grid = {b0, b_last - b0 + 1};
  if (a > N || problem.grid.H <= 0) return problem;

  const std::int64_t M = N / a;
  const auto R = static_cast<std::size_t>(table.R());

  // l and 2m - l, 2m + l, 4m - l share l^2 mod 4m, so l in [0, m] with
  // multiplicity 2 at the ends and 4 inside covers all 4m terms.
  std::vector<RawTerm> raw;
  raw.reserve(static_cast<std::size_t>(M * (M + 3) / 2 + 1));
  for (std::int64_t m = 1; m <= M; ++m) {
    const std::int64_t den = 4 * m;
    for (std::int64_t l = 0; l <= m; ++l) {
      const double mult = (l == 0 || l == m) ? 2.0 : 4.0;
      const Fraction f = reduce_fraction((l * l) % den, den);
      raw.push_back({static_cast<double>(f.num) / static_cast<double>(f.den), f,
                     static_cast<std::uint32_t>(m - 1), mult});
    }
  }
  // Distinct reduced fractions with denominators below 2^26 differ by far more
  // than a double ulp, so the quotient orders them exactly.
  if (4 * M >= (std::int64_t{1} << 26)) {
    std::sort(raw.begin(), raw.end(), [](const RawTerm& x, const RawTerm& y) {
      if (fraction_less(x.node, y.node)) return true;
      if (fraction_less(y.node, x.node)) return false;
      return x.column < y.column;
    });
  } else {
    std::sort(raw.begin(), raw.end(), [](const RawTerm& x, const RawTerm& y) {
      return x.key < y.key || (x.key == y.key && x.column < y.column);
    });
  }

  std::vector<Fraction> nodes;
  std::vector<std::size_t> offsets{0};
  std::vector<NodeSum::Contribution> contributions;
  Complex phase;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const bool new_node = nodes.empty() || !(nodes.back() == raw[i].node);
    if (new_node) {
      if (!nodes.empty()) offsets.push_back(contributions.size());
      nodes.push_back(raw[i].node);
      phase = unit_phase(raw[i].node, b0);
      contributions.push_back({raw[i].column, raw[i].weight * phase});
    } else if (contributions.back().column == raw[i].column) {
      contributions.back().weight += raw[i].weight * phase;
    } else {
      contributions.push_back({raw[i].column, raw[i].weight * phase});
    }
  }
  offsets.push_back(contributions.size());

  std::vector<Complex> basis(R * static_cast<std::size_t>(M));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::int64_t m = 1; m <= M; ++m) {
      Complex c = table.at(static_cast<std::int64_t>(r), a * m);
      if (convention == Convention::sqrt_a_scaling) c /= std::sqrt(static_cast<double>(m));
      basis[r * static_cast<std::size_t>(M) + static_cast<std::size_t>(m - 1)] = c;
    }
  }
  problem.sum = NodeSum(std::move(nodes), std::move(offsets), std::move(contributions), R,
                        static_cast<std::size_t>(M), std::move(basis));
  problem.sum.raw_terms = static_cast<std::size_t>(2 * M * (M + 1));
  return problem;
}

namespace {

MultiEvalResult direct_eval_impl(const NodeSum& p, std::span<const std::int64_t> offsets) {
  const std::size_t K = p.K();
  const std::size_t R = p.R();
  MultiEvalResult out;
  out.R = R;
  out.points = offsets.size();
  out.values.assign(R * offsets.size(), Complex{});
  // k-major copy of the coefficients so the inner loop over r is contiguous.
  std::vector<Complex> coeffs(K * R);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t k = 0; k < K; ++k) coeffs[k * R + r] = p.coefficient(r, k);
  }
  std::vector<CompensatedComplexSum> acc(R);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    std::fill(acc.begin(), acc.end(), CompensatedComplexSum{});
    for (std::size_t k = 0; k < K; ++k) {
      const Complex phase = unit_phase(p.nodes()[k], offsets[i]);
      const Complex* c = coeffs.data() + k * R;
      for (std::size_t r = 0; r < R; ++r) acc[r].add(c[r] * phase);
    }
    for (std::size_t r = 0; r < R; ++r) out.values[r * offsets.size() + i] = acc[r].value();
  }
  out.ops.direct_terms = static_cast<std::uint64_t>(K) * offsets.size() * R;
  return out;
}

}  // namespace

MultiEvalResult direct_eval(const NodeSum& p, const EvalGrid& g) {
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(std::max<std::int64_t>(g.H, 0)));
  std::iota(offsets.begin(), offsets.end(), std::int64_t{0});
  return direct_eval_impl(p, offsets);
}

MultiEvalResult direct_eval_points(const NodeSum& p, std::span<const std::int64_t> offsets) {
  return direct_eval_impl(p, offsets);
}

double fast_eval_floor(const NodeSum& p) {
  if (p.scale() == 0.0) return 0.0;
  return kFastEvalRelativeFloor * p.max_l1_norm() / p.scale();
}

GriddingPlan plan_gridding(const NodeSum& p, const EvalGrid& g, double eps3) {
  GriddingPlan plan;
  const std::int64_t H = std::max<std::int64_t>(g.H, 1);
  const std::int64_t shift = H / 2;
  const std::int64_t max_mode = std::max(shift, H - 1 - shift);
  plan.fine_grid = next_smooth(std::max<std::int64_t>(2 * H, 8));
  const auto nf = static_cast<double>(plan.fine_grid);

  // Outputs are accurate to `target` relative to sum |a_k|; converting the
  // scale-relative eps3 needs the ratio max_l1 / scale (<= K).
  const double ratio = p.scale() > 0.0 ? p.max_l1_norm() / p.scale() : 1.0;
  plan.target = std::min(eps3 / std::max(ratio, 1.0), 0.1);
  const double L = std::log(1.0 / plan.target);

  // Aliasing, after deconvolution, is at most exp(-tau nf (nf - 2 max_mode));
  // pin it to the target.
  plan.tau = L / (nf * (nf - 2.0 * static_cast<double>(max_mode)));
  // Kernel in grid cells: exp(-beta s^2). The truncated tail beyond half_width
  // cells, amplified by the deconvolution exp(tau max_mode^2), must stay below
  // target as well.
  const double beta = std::numbers::pi * std::numbers::pi / (nf * nf * plan.tau);
  const double mm = static_cast<double>(max_mode);
  const double needed = std::sqrt((L + plan.tau * mm * mm + std::log(10.0)) / beta);
  plan.half_width = std::max<std::int64_t>(
      {1, static_cast<std::int64_t>(std::ceil(std::log(1.0 / eps3))),
       static_cast<std::int64_t>(std::ceil(needed))});
  return plan;
}

MultiEvalResult fast_eval(const NodeSum& p, const EvalGrid& g, double eps3, unsigned threads) {
  if (!(eps3 > 0.0 && eps3 < 1.0)) throw DomainError("fast_eval: eps3 must lie in (0, 1)");
  const double floor = fast_eval_floor(p);
  if (eps3 < floor * (1.0 - 1e-12)) {
    throw AccuracyError("fast_eval: eps3 = " + std::to_string(eps3) +
                            " is below the double-precision floor " + std::to_string(floor),
                        floor);
  }
  const std::size_t R = p.R();
  const std::size_t H = static_cast<std::size_t>(std::max<std::int64_t>(g.H, 0));
  MultiEvalResult out;
  out.R = R;
  out.points = H;
  out.values.assign(R * H, Complex{});
  const std::size_t K = p.K();
  if (K == 0 || H == 0 || p.scale() == 0.0) return out;

  const GriddingPlan plan = plan_gridding(p, g, eps3);
  const std::int64_t nf = plan.fine_grid;
  const std::int64_t w = plan.half_width;
  const std::int64_t shift = g.H / 2;
  const double beta = std::numbers::pi * std::numbers::pi /
                      (static_cast<double>(nf) * static_cast<double>(nf) * plan.tau);

  // Node setup, shared by every coefficient vector.
  struct NodeKernel {
    std::int64_t first_cell;  // cell of offset -(w-1), wrapped
    double start;             // kernel weight at that cell
    double ratio;             // weight ratio between neighbouring cells
    Complex fold;             // exp(2 pi i alpha shift), recentres h
  };
  std::vector<NodeKernel> kernels(K);
  for (std::size_t k = 0; k < K; ++k) {
    const Fraction& f = p.nodes()[k];
    const i128 scaled = static_cast<i128>(f.num) * nf;
    const auto cell = static_cast<std::int64_t>(scaled / f.den);
    const double u = static_cast<double>(static_cast<std::int64_t>(scaled % f.den)) /
                     static_cast<double>(f.den);
    // exp(-beta (s - u)^2) = exp(-beta u^2) exp(2 beta u s) exp(-beta s^2)
    kernels[k].first_cell = floor_mod(cell - (w - 1), nf);
    kernels[k].start = std::exp(-beta * u * u - 2.0 * beta * u * static_cast<double>(w - 1));
    kernels[k].ratio = std::exp(2.0 * beta * u);
    kernels[k].fold = unit_phase(f, shift);
  }
  std::vector<double> profile(static_cast<std::size_t>(2 * w));
  for (std::int64_t s = 0; s < 2 * w; ++s) {
    const auto offset = static_cast<double>(s - (w - 1));
    profile[static_cast<std::size_t>(s)] = std::exp(-beta * offset * offset);
  }

  const double inv_scale = 1.0 / p.scale();
  const double norm = std::sqrt(std::numbers::pi / plan.tau) / static_cast<double>(nf) * p.scale();
  const auto cells = static_cast<std::size_t>(nf);
  const auto width = static_cast<std::size_t>(2 * w);

  // Each worker spreads every node onto the grids of a block of rows, so the
  // kernel row of a node is computed once per block.
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), R);
  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t c) {
    const std::size_t r_lo = R * c / workers;
    const std::size_t r_hi = R * (c + 1) / workers;
    const std::size_t rows = r_hi - r_lo;
    std::vector<Complex> grids(rows * cells);
    std::vector<Complex> a(rows);
    std::vector<double> kernel(width);
    for (std::size_t k = 0; k < K; ++k) {
      const NodeKernel& nk = kernels[k];
      p.coefficient_rows(k, r_lo, r_hi, a.data());
      const Complex fold = kernels[k].fold * inv_scale;
      for (Complex& v : a) v *= fold;
      double weight = nk.start;
      for (std::size_t s = 0; s < width; ++s) {
        kernel[s] = weight * profile[s];
        weight *= nk.ratio;
      }
      const auto first = static_cast<std::size_t>(nk.first_cell);
      const std::size_t run1 = std::min(width, cells - first);
      for (std::size_t j = 0; j < rows; ++j) {
        const Complex aj = a[j];
        if (aj == Complex{}) continue;
        Complex* g = grids.data() + j * cells;
        if (width <= cells) {
          for (std::size_t s = 0; s < run1; ++s) g[first + s] += aj * kernel[s];
          for (std::size_t s = run1; s < width; ++s) g[s - run1] += aj * kernel[s];
        } else {
          for (std::size_t s = 0; s < width; ++s) g[(first + s) % cells] += aj * kernel[s];
        }
      }
    }
    for (std::size_t j = 0; j < rows; ++j) {
      Complex* g = grids.data() + j * cells;
      BackwardFft::run(g, cells);
      Complex* row = out.values.data() + (r_lo + j) * H;
      for (std::size_t i = 0; i < H; ++i) {
        const auto mode = static_cast<std::int64_t>(i) - shift;
        const double deconv = norm * std::exp(plan.tau * static_cast<double>(mode * mode));
        row[i] = g[static_cast<std::size_t>(floor_mod(mode, nf))] * deconv;
      }
    }
  });

  const auto log2nf = std::log2(static_cast<double>(nf));
  out.ops.node_setup = K;
  out.ops.spread = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(2 * w) * R;
  out.ops.fft = static_cast<std::uint64_t>(5.0 * static_cast<double>(nf) * log2nf) * R;
  out.ops.deconvolution = static_cast<std::uint64_t>(H) * R;
  return out;
}

}  // namespace qlf
