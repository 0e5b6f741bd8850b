#include "qlf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <string>

#include "qlf/compensated.hpp"
#include "qlf/error.hpp"
#include "qlf/oracle.hpp"
#include "qlf/parallel.hpp"

namespace qlf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Bound on the rounding of a direct sum whose terms total `l1` in modulus.
double direct_rounding_bound(double l1) {
  return 8.0 * std::numeric_limits<double>::epsilon() * l1;
}

STableEntry evaluate_divisor(std::int64_t a, const BatchRequest& request,
                             const ErrorBudget& budget, const CoefficientTable& table,
                             const std::vector<std::int64_t>& consumers, Method method,
                             unsigned threads) {
  NodeProblem problem = build_node_problem(a, table, request.window, request.convention);
  STableEntry entry;
  entry.a = a;
  entry.b0 = problem.grid.b0;
  entry.H = std::max<std::int64_t>(problem.grid.H, 0);
  entry.R = static_cast<std::size_t>(budget.R);
  entry.nodes = problem.sum.K();
  entry.raw_terms = problem.sum.raw_terms;
  const auto H = static_cast<std::size_t>(entry.H);
  entry.values.assign(entry.R * H, Complex{});
  entry.present.assign(H, false);
  if (problem.empty()) {
    std::fill(entry.present.begin(), entry.present.end(), true);
    return entry;
  }
  const NodeSum& sum = problem.sum;
  const std::uint64_t size = static_cast<std::uint64_t>(sum.K()) * H * entry.R;

  if (method == Method::direct) {
    std::vector<std::int64_t> offsets;
    offsets.reserve(consumers.size());
    for (std::int64_t b : consumers) offsets.push_back(b - entry.b0);
    const MultiEvalResult res = direct_eval_points(sum, offsets);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const auto j = static_cast<std::size_t>(offsets[i]);
      entry.present[j] = true;
      for (std::size_t r = 0; r < entry.R; ++r) entry.values[r * H + j] = res.at(r, i);
    }
    entry.ops = res.ops;
    entry.abs_error = direct_rounding_bound(sum.max_l1_norm());
    return entry;
  }

  MultiEvalResult res;
  if (size <= kDirectCrossover) {
    res = direct_eval(sum, problem.grid);
    entry.abs_error = direct_rounding_bound(sum.max_l1_norm());
  } else {
    const double eps = std::max(budget.epsilon3 / sum.scale(), fast_eval_floor(sum));
    res = fast_eval(sum, problem.grid, std::min(eps, 0.5), threads);
    entry.abs_error = eps * sum.scale();
    entry.transform = true;
  }
  entry.values = std::move(res.values);
  std::fill(entry.present.begin(), entry.present.end(), true);
  entry.ops = res.ops;
  return entry;
}

}  // namespace

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::fast: return "fast";
    case Method::direct: return "direct";
    case Method::compare: return "compare";
  }
  return "?";
}

bool STableEntry::has(std::int64_t b) const {
  const std::int64_t j = b - b0;
  return j >= 0 && j < H && present[static_cast<std::size_t>(j)];
}

Complex STableEntry::at(std::size_t r, std::int64_t b) const {
  return values[r * static_cast<std::size_t>(H) + static_cast<std::size_t>(b - b0)];
}

const STableEntry* STable::find(std::int64_t a) const {
  auto it = entries.find(a);
  return it == entries.end() ? nullptr : &it->second;
}

DivisorPlan plan_divisors(const FactorTable& factors, std::int64_t N) {
  DivisorPlan plan;
  for (const auto& [q, fc] : factors) {
    if (!is_fundamental_odd_positive(fc)) continue;
    auto terms = divisor_terms(fc, N);
    for (const DivisorTerm& term : terms) plan.consumers[term.a].push_back(q / term.a);
    plan.terms.emplace(q, std::move(terms));
  }
  for (auto& [a, bs] : plan.consumers) std::sort(bs.begin(), bs.end());
  return plan;
}

std::vector<std::int64_t> realized_divisors(const FactorTable& factors, std::int64_t N) {
  std::set<std::int64_t> divisors;
  for (const auto& [q, fc] : factors) {
    if (!is_fundamental_odd_positive(fc)) continue;
    for (const DivisorTerm& term : divisor_terms(fc, N)) divisors.insert(term.a);
  }
  return {divisors.begin(), divisors.end()};
}

STable compute_s_tables(const BatchRequest& request, const ErrorBudget& budget,
                        const CoefficientTable& table, const DivisorPlan& plan,
                        Method method) {
  if (method == Method::compare) throw DomainError("compute_s_tables: pick fast or direct");
  std::vector<std::int64_t> large;
  std::vector<std::int64_t> small;
  for (const auto& [a, consumers] : plan.consumers) {
    const std::int64_t m = table.N() / a;
    const auto nodes_hint = static_cast<std::uint64_t>(2 * m * (m + 1));
    const auto points = static_cast<std::uint64_t>(request.window.Delta / a + 1);
    if (nodes_hint * points * static_cast<std::uint64_t>(budget.R) > kDirectCrossover) {
      large.push_back(a);
    } else {
      small.push_back(a);
    }
  }
  STable s;
  // Large problems parallelize internally over r, the many small ones over a.
  for (std::int64_t a : large) {
    s.entries.emplace(a, evaluate_divisor(a, request, budget, table, plan.consumers.at(a),
                                          method, request.threads));
  }
  std::vector<STableEntry> done(small.size());
  parallel_for(small.size(), request.threads, [&](std::size_t i) {
    done[i] = evaluate_divisor(small[i], request, budget, table, plan.consumers.at(small[i]),
                               method, 1);
  });
  for (STableEntry& e : done) s.entries.emplace(e.a, std::move(e));
  return s;
}

AssembledF assemble_F(const FactoredConductor& fc, const std::vector<DivisorTerm>& terms,
                      const STable& s, const ErrorBudget& budget, double t,
                      Convention convention) {
  const std::int64_t q = fc.q;
  const double qd = static_cast<double>(q);
  const double x = static_cast<double>(budget.Q - q) / qd;
  const auto R = static_cast<std::size_t>(budget.R);

  struct Resolved {
    const STableEntry* entry;
    std::int64_t b;
    double weight;  // sign * a, or sign * sqrt(a)
  };
  std::vector<Resolved> resolved;
  resolved.reserve(terms.size());
  AssembledF out;
  double error_per_power = 0.0;
  for (const DivisorTerm& term : terms) {
    const STableEntry* entry = s.find(term.a);
    const std::int64_t b = q / term.a;
    if (entry == nullptr || !entry->has(b)) {
      throw ConsistencyError("assemble_F: missing S entry for a = " + std::to_string(term.a) +
                             ", b = " + std::to_string(b));
    }
    const double amp = convention == Convention::a_scaling
                           ? static_cast<double>(term.a)
                           : std::sqrt(static_cast<double>(term.a));
    resolved.push_back({entry, b, term.sign * amp});
    out.amplification += amp;
    error_per_power += amp * entry->abs_error;
  }

  CompensatedComplexSum taylor;
  double power = 1.0;
  double power_sum = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    CompensatedComplexSum inner;
    for (const Resolved& term : resolved) inner.add(term.weight * term.entry->at(r, term.b));
    taylor.add(power * inner.value());
    power_sum += std::abs(power);
    power *= x;
  }
  out.terms = resolved.size();
  out.ops = static_cast<std::uint64_t>(R) * (resolved.size() + 1);

  const Complex prefactor = c_prefactor(t, qd) * g_prefactor(q);
  if (std::abs(t) <= 1.0 && std::abs(prefactor) > 0.34) {
    throw ConsistencyError("assemble_F: |g(q) C(t,q)| exceeds 0.34");
  }
  out.F = prefactor * taylor.value();
  out.error = std::abs(prefactor) * power_sum * error_per_power;
  return out;
}

double compute_Z(Complex F, double theta) { return 2.0 * (std::polar(1.0, theta) * F).real(); }

namespace {

BatchResult run_oracle_route(const BatchRequest& request, const FactorTable& factors,
                             Clock::time_point start) {
  BatchResult result;
  result.method = "oracle";
  result.oracle_route = true;
  std::vector<std::int64_t> qs;
  for (const auto& [q, fc] : factors) {
    if (is_fundamental_odd_positive(fc)) qs.push_back(q);
  }
  result.records.resize(qs.size());
  parallel_for(qs.size(), request.threads, [&](std::size_t i) {
    const OracleResult o = direct_Z(qs[i], request.t, request.epsilon);
    BatchRecord& rec = result.records[i];
    rec.q = qs[i];
    rec.t = request.t;
    rec.Z = o.Z;
    rec.theta = o.theta;
    rec.F = o.F;
    rec.error_bound = 2.0 * o.tail_bound;
    rec.recovery_ops = o.special_calls;
    rec.divisor_count = factors.at(qs[i]).divisor_count();
  });
  for (const auto& rec : result.records) result.recovery_ops += rec.recovery_ops;
  result.wall_seconds = seconds_since(start);
  result.recovery_seconds = result.wall_seconds;
  return result;
}

struct Recovery {
  std::vector<BatchRecord> records;
  std::uint64_t ops = 0;
};

Recovery recover_all(const BatchRequest& request, const ErrorBudget& budget,
                     const FactorTable& factors, const DivisorPlan& plan, const STable& s) {
  std::vector<std::int64_t> qs;
  qs.reserve(plan.terms.size());
  for (const auto& [q, terms] : plan.terms) qs.push_back(q);
  Recovery out;
  out.records.resize(qs.size());
  const double truncation = 2.0 * budget.epsilon1 + 2.0 * budget.epsilon2;
  parallel_for(qs.size(), request.threads, [&](std::size_t i) {
    const std::int64_t q = qs[i];
    const FactoredConductor& fc = factors.at(q);
    const AssembledF f = assemble_F(fc, plan.terms.at(q), s, budget, request.t, request.convention);
    BatchRecord& rec = out.records[i];
    rec.q = q;
    rec.t = request.t;
    rec.F = f.F;
    rec.theta = theta_phase(request.t, 0, static_cast<double>(q));
    rec.Z = compute_Z(f.F, rec.theta);
    rec.error_bound = truncation + 2.0 * f.error;
    rec.recovery_ops = f.ops;
    rec.divisor_count = fc.divisor_count();
    rec.terms = f.terms;
  });
  for (const auto& rec : out.records) out.ops += rec.recovery_ops;
  return out;
}

}  // namespace

BatchResult run_batch(const BatchRequest& request) {
  const auto start = Clock::now();
  validate_window(request.window);
  if (!(request.epsilon > 0.0 && request.epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
  if (std::abs(request.t) > 10.0) throw ConfigError("|t| must not exceed 10");
  const ErrorBudget budget =
      plan_budget(request.window.Q, request.window.Delta, request.epsilon, request.t);

  const FactorTable factors = sieve_factor_window(request.window);
  if (request.window.Q < kFastPathMinQ) {
    BatchResult result = run_oracle_route(request, factors, start);
    result.budget = budget;
    return result;
  }

  BatchResult result;
  result.budget = budget;
  result.method = method_name(request.method);
  result.sieve_ops = static_cast<std::uint64_t>(request.window.Delta / 2 + 1);

  const DivisorPlan plan = plan_divisors(factors, budget.N);
  result.realized_divisors = plan.consumers.size();
  if (plan.terms.empty()) {
    result.wall_seconds = seconds_since(start);
    if (request.method == Method::compare) {
      result.max_deviation_direct = result.mean_deviation_direct = 0.0;
      result.max_deviation_oracle = result.mean_deviation_oracle = 0.0;
    }
    return result;
  }

  CoefficientTable table;
  if (request.cache_dir) {
    table = load_or_build_coefficient_table(*request.cache_dir, request.t, budget.Q, budget.N,
                                            budget.R, request.threads, &result.cache_hit);
  } else {
    table = build_coefficient_table(request.t, budget.Q, budget.N, budget.R, request.threads);
  }
  result.coefficient_ops = static_cast<std::uint64_t>(budget.N * budget.R);

  const Method primary = request.method == Method::direct ? Method::direct : Method::fast;
  const STable s = compute_s_tables(request, budget, table, plan, primary);
  for (const auto& [a, entry] : s.entries) {
    result.node_build_ops += entry.raw_terms;
    result.multieval_ops += entry.ops;
  }
  result.precompute_seconds = seconds_since(start);

  const auto recovery_start = Clock::now();
  Recovery recovered = recover_all(request, budget, factors, plan, s);
  result.recovery_seconds = seconds_since(recovery_start);
  result.records = std::move(recovered.records);
  result.recovery_ops = recovered.ops;

  if (request.method == Method::compare) {
    const STable s_direct = compute_s_tables(request, budget, table, plan, Method::direct);
    const Recovery direct = recover_all(request, budget, factors, plan, s_direct);
    std::vector<double> oracle_dev(result.records.size());
    parallel_for(result.records.size(), request.threads, [&](std::size_t i) {
      const BatchRecord& rec = result.records[i];
      oracle_dev[i] = std::abs(rec.Z - direct_Z(rec.q, request.t, request.epsilon).Z);
    });
    double max_d = 0.0, sum_d = 0.0, max_o = 0.0, sum_o = 0.0;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const double d = std::abs(result.records[i].Z - direct.records[i].Z);
      max_d = std::max(max_d, d);
      sum_d += d;
      max_o = std::max(max_o, oracle_dev[i]);
      sum_o += oracle_dev[i];
    }
    const auto n = static_cast<double>(result.records.size());
    result.max_deviation_direct = max_d;
    result.mean_deviation_direct = sum_d / n;
    result.max_deviation_oracle = max_o;
    result.mean_deviation_oracle = sum_o / n;
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace qlf
