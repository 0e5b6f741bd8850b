#pragma once

// Nonuniform exponential sums Z(h) = sum_k a_k exp(2 pi i alpha_k h), evaluated
// at every integer h of a window, for several coefficient vectors a(r) that
// share one node set.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qlf/arith.hpp"
#include "qlf/special_fn.hpp"
#include "qlf/taylor.hpp"

namespace qlf {

// Reduced fraction num/den in [0, 1).
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

Fraction reduce_fraction(std::int64_t num, std::int64_t den);
bool fraction_less(const Fraction& x, const Fraction& y) noexcept;

// exp(2 pi i alpha h) with alpha h reduced mod 1 exactly.
Complex unit_phase(const Fraction& alpha, std::int64_t h);

// Node set plus R coefficient vectors, stored factored:
//   a_k(r) = sum over contributions e of node k of  weight_e * basis(r, column_e).
// A dense problem is the special case of one contribution per node. In the main
// sum the basis row r holds c_r(t, a m) over m, and the weights carry the
// number of l with l^2/(4m) = alpha_k together with the phase pre-fold.
class NodeSum {
 public:
  struct Contribution {
    std::uint32_t column;
    Complex weight;
  };

  NodeSum() = default;

  // Sorted, deduplicated nodes; offsets has K+1 entries into contributions;
  // basis is R rows of `columns` entries.
  NodeSum(std::vector<Fraction> nodes, std::vector<std::size_t> offsets,
          std::vector<Contribution> contributions, std::size_t rows, std::size_t columns,
          std::vector<Complex> basis);

  // Nodes in any order, duplicates allowed; coeffs[r][k] belongs to nodes[k].
  static NodeSum from_dense(std::span<const Fraction> nodes,
                            const std::vector<std::vector<Complex>>& coeffs);

  std::size_t K() const noexcept { return nodes_.size(); }
  std::size_t R() const noexcept { return rows_; }
  const std::vector<Fraction>& nodes() const noexcept { return nodes_; }

  // max |a_k(r)| over k and r.
  double scale() const noexcept { return scale_; }
  // sum_k |a_k(r)|.
  double l1_norm(std::size_t r) const { return l1_[r]; }
  double max_l1_norm() const noexcept { return max_l1_; }

  Complex coefficient(std::size_t r, std::size_t k) const;
  std::vector<Complex> coefficients(std::size_t r) const;
  // a_k(r) for r in [r_lo, r_hi) into out[0 .. r_hi - r_lo).
  void coefficient_rows(std::size_t k, std::size_t r_lo, std::size_t r_hi, Complex* out) const;

  // Same sums re-anchored at b0 + delta: weights pick up exp(2 pi i alpha delta).
  NodeSum shifted(std::int64_t delta) const;

  // Terms before duplicate nodes were merged.
  std::size_t raw_terms = 0;

 private:
  void compute_norms();

  std::vector<Fraction> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<Contribution> contributions_;
  std::size_t rows_ = 0;
  std::size_t columns_ = 0;
  std::vector<Complex> basis_;
  double scale_ = 0.0;
  std::vector<double> l1_;
  double max_l1_ = 0.0;
};

// Integer evaluation points b0, ..., b0 + H - 1.
struct EvalGrid {
  std::int64_t b0 = 0;
  std::int64_t H = 0;
};

struct MultiEvalOps {
  std::uint64_t node_setup = 0;    // per-node preprocessing, shared by all r
  std::uint64_t spread = 0;        // kernel-weighted grid updates
  std::uint64_t fft = 0;           // 5 n log2 n per transform
  std::uint64_t deconvolution = 0;
  std::uint64_t direct_terms = 0;  // node-point products of the direct path

  std::uint64_t total() const noexcept {
    return node_setup + spread + fft + deconvolution + direct_terms;
  }
  MultiEvalOps& operator+=(const MultiEvalOps& o) noexcept {
    node_setup += o.node_setup;
    spread += o.spread;
    fft += o.fft;
    deconvolution += o.deconvolution;
    direct_terms += o.direct_terms;
    return *this;
  }
};

// R x P block of results, row r holding the values for coefficient vector r.
struct MultiEvalResult {
  std::size_t R = 0;
  std::size_t points = 0;
  std::vector<Complex> values;
  MultiEvalOps ops;

  Complex at(std::size_t r, std::size_t i) const { return values[r * points + i]; }
};

// Convention for the weights entering the divisor sums.
// Only sqrt_a_scaling reproduces the character sum; a_scaling drops the 1/sqrt(n)
// that normalizes g(q) g_q(2n) to chi_q(n) and exists as a fault mode.
enum class Convention {
  sqrt_a_scaling,  // 1/sqrt(m) inside, tilde S = sqrt(a) * S
  a_scaling,       // weight-free inner sums, tilde S = a * S
};

struct NodeProblem {
  NodeSum sum;
  EvalGrid grid;
  bool empty() const noexcept { return grid.H <= 0 || sum.K() == 0; }
};

// Node problem of divisor a: nodes (l^2 mod 4m)/(4m) for m <= N/a, 0 <= l < 4m;
// basis rows c_r(t, a m) (divided by sqrt(m) under sqrt_a_scaling); weights
// pre-folded with exp(2 pi i alpha b0) so that h = b - b0. The grid spans the
// integers b with a b in the window. a > N gives an empty problem.
NodeProblem build_node_problem(std::int64_t a, const CoefficientTable& table,
                               const Window& window,
                               Convention convention = Convention::sqrt_a_scaling);

// Exact O(K H R) summation with compensated accumulation.
MultiEvalResult direct_eval(const NodeSum& p, const EvalGrid& g);

// Direct summation at selected offsets h (points b0 + h).
MultiEvalResult direct_eval_points(const NodeSum& p, std::span<const std::int64_t> offsets);

// Relative accuracy floor of fast_eval, measured against sum_k |a_k|.
inline constexpr double kFastEvalRelativeFloor = 1e-13;

// Smallest eps3 that fast_eval accepts for p (scale-relative).
double fast_eval_floor(const NodeSum& p);

// Gaussian-gridding transform: every output within eps3 * scale of the direct
// sum. Throws AccuracyError when eps3 < fast_eval_floor(p).
MultiEvalResult fast_eval(const NodeSum& p, const EvalGrid& g, double eps3,
                          unsigned threads = 1);

// Kernel parameters fast_eval picks for a problem; exposed for tests and
// diagnostics.
struct GriddingPlan {
  std::int64_t fine_grid = 0;   // oversampled FFT length, >= 2H
  std::int64_t half_width = 0;  // spreading half-width in grid cells
  double tau = 0.0;             // Gaussian exp(-x^2 / (4 tau)) on [0, 2 pi)
  double target = 0.0;          // relative L1 accuracy aimed for
};
GriddingPlan plan_gridding(const NodeSum& p, const EvalGrid& g, double eps3);

}  // namespace qlf
