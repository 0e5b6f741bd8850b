#include "qlf_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlf/arith.hpp"
#include "qlf/error.hpp"
#include "qlf/gauss.hpp"
#include "qlf/multieval.hpp"
#include "qlf/oracle.hpp"
#include "qlf/taylor.hpp"

namespace qlf::cli {
namespace {

Convention parse_convention(const std::string& name) {
  if (name == "a") return Convention::a_scaling;
  if (name == "sqrt-a") return Convention::sqrt_a_scaling;
  throw ConfigError("unknown convention '" + name + "'");
}

// Maps library exceptions to exit codes; everything else is a bug and escapes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const AccuracyError& e) {
    err << "error: " << e.what() << " (smallest feasible epsilon here: " << e.floor() << ")\n";
    return kBudgetInfeasible;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}

// Writes to --out when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw IoError("cannot open " + path + " for writing");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }
  void finish(const std::string& path) {
    os_->flush();
    if (!*os_) throw IoError("write failed" + (path.empty() ? std::string() : " for " + path));
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void write_records(std::ostream& os, const std::vector<BatchRecord>& records,
                   const std::string& method, const std::string& format) {
  if (format == "json") {
    write_json(os, records, method);
  } else {
    write_csv(os, records, method);
  }
}

void print_counters(std::ostream& os, const BatchResult& r) {
  os << "fundamental_q: " << r.records.size() << '\n'
     << "N: " << r.budget.N << '\n'
     << "R: " << r.budget.R << '\n'
     << "epsilon3: " << format_real(r.budget.epsilon3) << '\n'
     << "realized_divisors: " << r.realized_divisors << '\n'
     << "ops_sieve: " << r.sieve_ops << '\n'
     << "ops_coefficients: " << r.coefficient_ops << '\n'
     << "ops_node_build: " << r.node_build_ops << '\n'
     << "ops_multieval: " << r.multieval_ops.total() << '\n'
     << "ops_precompute: " << r.precompute_ops() << '\n'
     << "ops_recovery: " << r.recovery_ops << '\n'
     << "seconds_precompute: " << r.precompute_seconds << '\n'
     << "seconds_recovery: " << r.recovery_seconds << '\n'
     << "seconds_wall: " << r.wall_seconds << '\n';
}

struct SuiteOutcome {
  bool pass = false;
  std::string detail;
};

SuiteOutcome suite_gauss() {
  double worst_char = 0.0;
  for (std::int64_t q = 5; q <= 301; q += 4) {
    if (!is_fundamental_odd_positive(factor_conductor(q))) continue;
    for (std::int64_t n = 1; n <= 50; ++n) {
      const int chi = kronecker(q, n);
      if (chi == 0) continue;
      worst_char = std::max(worst_char, std::abs(character_from_gauss(q, n) - Complex(chi, 0.0)));
    }
  }
  double worst_quarter = 0.0;
  for (std::int64_t b = 1; b <= 31; b += 2) {
    for (std::int64_t m = 1; m <= 30; ++m) {
      const Complex ref = gauss_sum_direct(b, 2 * m);
      const double rel = std::abs(gauss_sum_fast(b, m) - ref) / std::max(1.0, std::abs(ref));
      worst_quarter = std::max(worst_quarter, rel);
    }
  }
  double worst_scaling = 0.0;
  for (std::int64_t q = 3; q <= 201; q += 2) {
    const FactoredConductor fc = factor_conductor(q);
    if (!fc.squarefree) continue;
    for (std::int64_t a = 1; a <= q; a += 2) {
      if (q % a != 0) continue;
      for (std::int64_t m = 1; m <= 20; ++m) {
        const Complex lhs = gauss_sum_direct(q, 2 * a * m);
        const Complex rhs = static_cast<double>(a) * gauss_sum_direct(q / a, 2 * m);
        worst_scaling = std::max(worst_scaling, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
  }
  std::ostringstream d;
  d << "character " << worst_char << ", quarter-length " << worst_quarter << ", scaling "
    << worst_scaling;
  return {worst_char < 1e-9 && worst_quarter < 1e-9 && worst_scaling < 1e-9, d.str()};
}

SuiteOutcome suite_budget() {
  const ErrorBudget b = plan_budget(10000, 4999, 1e-6, 0.0);
  const double tail = tail_bound(b.N, b.Q);
  const double taylor = taylor_remainder_bound(b.N, b.Q, b.Delta, b.R);
  std::ostringstream d;
  d << "N " << b.N << ", R " << b.R << ", tail " << tail << ", taylor " << taylor;
  const bool ok = b.N == 400 && b.R == 32 && tail < b.epsilon1 && taylor < b.epsilon2 &&
                  b.epsilon1 + b.epsilon2 <= b.epsilon / 4.0;
  return {ok, d.str()};
}

SuiteOutcome suite_multieval(unsigned threads) {
  std::mt19937_64 rng(20261014);
  std::uniform_int_distribution<std::int64_t> den_dist(2, 4096);
  std::normal_distribution<double> coeff(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t K = 256;
    std::vector<Fraction> nodes;
    std::vector<std::vector<Complex>> coeffs(3, std::vector<Complex>(K));
    for (std::size_t k = 0; k < K; ++k) {
      const std::int64_t den = den_dist(rng);
      nodes.push_back(reduce_fraction(std::uniform_int_distribution<std::int64_t>(0, den - 1)(rng), den));
      for (auto& row : coeffs) row[k] = {coeff(rng), coeff(rng)};
    }
    const NodeSum sum = NodeSum::from_dense(nodes, coeffs);
    const EvalGrid grid{-300 + 17 * trial, 600};
    const MultiEvalResult fast = fast_eval(sum, grid, 1e-9, threads);
    const MultiEvalResult ref = direct_eval(sum, grid);
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      worst = std::max(worst, std::abs(fast.values[i] - ref.values[i]) / sum.scale());
    }
  }
  std::ostringstream d;
  d << "max relative deviation " << worst;
  return {worst < 1e-9, d.str()};
}

SuiteOutcome suite_end_to_end(unsigned threads, Convention convention) {
  BatchRequest req;
  req.window = {10000, 300};
  req.t = 0.3;
  req.epsilon = 1e-6;
  req.threads = threads;
  req.convention = convention;
  const BatchResult res = run_batch(req);
  double worst = 0.0;
  for (const BatchRecord& rec : res.records) {
    worst = std::max(worst, std::abs(rec.Z - direct_Z(rec.q, req.t, req.epsilon).Z));
  }
  std::ostringstream d;
  d << res.records.size() << " characters, max |Z - oracle| " << worst;
  return {!res.records.empty() && worst < req.epsilon, d.str()};
}

}  // namespace

std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<BatchRecord>& records, const std::string& method) {
  os << "q,t,Z,theta,error_bound,method\n";
  for (const BatchRecord& r : records) {
    os << r.q << ',' << format_real(r.t) << ',' << format_real(r.Z) << ',' << format_real(r.theta)
       << ',' << format_real(r.error_bound) << ',' << method << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<BatchRecord>& records, const std::string& method) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BatchRecord& r : records) {
    arr.push_back({{"q", r.q},
                   {"t", r.t},
                   {"Z", r.Z},
                   {"theta", r.theta},
                   {"error_bound", r.error_bound},
                   {"method", method}});
  }
  os << arr.dump(1) << '\n';
}

BatchRequest make_request(const EvalOptions& opts, Method method) {
  BatchRequest req;
  req.window = {opts.q_min, opts.q_width};
  req.t = opts.t;
  req.epsilon = opts.epsilon;
  req.method = method;
  req.convention = parse_convention(opts.convention);
  req.threads = opts.threads;
  if (!opts.cache.empty()) req.cache_dir = opts.cache;
  return req;
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.method != "fast" && opts.method != "direct") {
      throw ConfigError("--method must be fast or direct for eval");
    }
    const BatchResult res =
        run_batch(make_request(opts, opts.method == "direct" ? Method::direct : Method::fast));
    Sink sink(opts.out, out);
    write_records(sink.stream(), res.records, res.method, opts.format);
    sink.finish(opts.out);
    err << res.records.size() << " characters, " << res.wall_seconds << " s\n";
    return kOk;
  });
}

int cmd_compare(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BatchResult res = run_batch(make_request(opts, Method::compare));
    Sink sink(opts.out, out);
    std::ostream& os = sink.stream();
    double max_dev = 0.0;
    if (res.oracle_route) {
      os << "route: oracle (Q below 10000)\n"
         << "max_deviation: 0\nmean_deviation: 0\n";
    } else {
      max_dev = std::max(res.max_deviation_direct.value_or(0.0), res.max_deviation_oracle.value_or(0.0));
      os << "max_deviation_direct: " << format_real(res.max_deviation_direct.value_or(0.0)) << '\n'
         << "mean_deviation_direct: " << format_real(res.mean_deviation_direct.value_or(0.0)) << '\n'
         << "max_deviation_oracle: " << format_real(res.max_deviation_oracle.value_or(0.0)) << '\n'
         << "mean_deviation_oracle: " << format_real(res.mean_deviation_oracle.value_or(0.0)) << '\n'
         << "max_deviation: " << format_real(max_dev) << '\n';
    }
    print_counters(os, res);
    const bool pass = max_dev < opts.epsilon;
    os << "result: " << (pass ? "pass" : "fail") << '\n';
    sink.finish(opts.out);
    return pass ? kOk : kCheckFailed;
  });
}

std::vector<double> t_grid(double t_min, double t_max, double t_step) {
  if (!(t_step > 0.0)) throw ConfigError("--t-step must be positive");
  if (!(t_max >= t_min)) throw ConfigError("--t-max must not be below --t-min");
  const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i) ts[i] = t_min + static_cast<double>(i) * t_step;
  return ts;
}

std::vector<SignChange> find_sign_changes(const std::vector<double>& ts,
                                          const std::vector<std::vector<BatchRecord>>& runs,
                                          double epsilon) {
  std::vector<SignChange> out;
  if (runs.size() < 2) return out;
  const std::size_t count = runs.front().size();
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      const double z0 = runs[i][j].Z;
      const double z1 = runs[i + 1][j].Z;
      if ((z0 < 0.0) == (z1 < 0.0)) continue;
      const bool certified = std::abs(z0) > 2.0 * epsilon && std::abs(z1) > 2.0 * epsilon;
      out.push_back({runs[i][j].q, ts[i], ts[i + 1], certified});
    }
  }
  return out;
}

int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.eval.method != "fast" && opts.eval.method != "direct") {
      throw ConfigError("--method must be fast or direct for scan");
    }
    const Method method = opts.eval.method == "direct" ? Method::direct : Method::fast;
    const std::vector<double> ts = t_grid(opts.t_min, opts.t_max, opts.t_step);
    std::vector<std::vector<BatchRecord>> runs;
    for (double t : ts) {
      EvalOptions point = opts.eval;
      point.t = t;
      runs.push_back(run_batch(make_request(point, method)).records);
    }
    const auto changes = find_sign_changes(ts, runs, opts.eval.epsilon);
    Sink sink(opts.eval.out, out);
    std::ostream& os = sink.stream();
    std::size_t certified = 0;
    if (opts.eval.format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const SignChange& c : changes) {
        arr.push_back({{"q", c.q}, {"t_lo", c.t_lo}, {"t_hi", c.t_hi},
                       {"status", c.certified ? "certified" : "uncertified"}});
        certified += c.certified;
      }
      os << arr.dump(1) << '\n';
    } else {
      os << "q,t_lo,t_hi,status\n";
      for (const SignChange& c : changes) {
        os << c.q << ',' << format_real(c.t_lo) << ',' << format_real(c.t_hi) << ','
           << (c.certified ? "certified" : "uncertified") << '\n';
        certified += c.certified;
      }
    }
    sink.finish(opts.eval.out);
    err << ts.size() << " grid points, " << certified << " certified sign changes, "
        << changes.size() - certified << " uncertified\n";
    return kOk;
  });
}

int cmd_selftest(const SelftestOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Convention convention = parse_convention(opts.convention);
    struct Suite {
      const char* name;
      std::function<SuiteOutcome()> run;
    };
    const std::vector<Suite> suites = {
        {"gauss", [] { return suite_gauss(); }},
        {"budget", [] { return suite_budget(); }},
        {"multieval", [&] { return suite_multieval(opts.threads); }},
        {"end-to-end", [&] { return suite_end_to_end(opts.threads, convention); }},
    };
    bool all = true;
    for (const Suite& s : suites) {
      const auto start = std::chrono::steady_clock::now();
      const SuiteOutcome o = s.run();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out << (o.pass ? "PASS " : "FAIL ") << std::left << std::setw(11) << s.name << ' '
          << std::fixed << std::setprecision(3) << secs << " s  " << std::defaultfloat
          << std::setprecision(6) << o.detail << '\n';
      all = all && o.pass;
    }
    return all ? kOk : kCheckFailed;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Z(t, chi_q) for all odd positive fundamental q in [Q, Q + Delta)", "qlf"};
  app.require_subcommand(1);

  EvalOptions eval;
  ScanOptions scan;
  SelftestOptions self;

  auto add_eval_flags = [](CLI::App* cmd, EvalOptions& o, bool with_method) {
    cmd->add_option("--q-min", o.q_min, "window start Q (>= 3)")->capture_default_str();
    cmd->add_option("--q-width", o.q_width, "window width Delta, 1 <= Delta <= Q/2")
        ->capture_default_str();
    cmd->add_option("--t", o.t, "height t, |t| <= 10")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon,
                    "absolute target accuracy; log2(Q/epsilon) must not exceed 45")
        ->capture_default_str();
    if (with_method) {
      cmd->add_option("--method", o.method, "fast or direct")
          ->check(CLI::IsMember({"fast", "direct"}))
          ->capture_default_str();
    }
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all available")
        ->capture_default_str();
    cmd->add_option("--cache", o.cache, "coefficient-table cache directory")
        ->envname("QLF_CACHE_DIR");
    cmd->add_option("--convention", o.convention, "divisor-sum weighting; a is a fault mode")
        ->check(CLI::IsMember({"a", "sqrt-a"}))
        ->capture_default_str();
  };

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate Z for every fundamental q in the window");
  add_eval_flags(c_eval, eval, true);
  CLI::App* c_compare = app.add_subcommand("compare", "fast versus direct and oracle deviations");
  add_eval_flags(c_compare, eval, false);
  CLI::App* c_scan = app.add_subcommand("scan", "sign changes of Z over a t grid");
  add_eval_flags(c_scan, scan.eval, true);
  c_scan->add_option("--t-min", scan.t_min, "first grid point")->capture_default_str();
  c_scan->add_option("--t-max", scan.t_max, "last grid point")->capture_default_str();
  c_scan->add_option("--t-step", scan.t_step, "grid spacing")->capture_default_str();
  CLI::App* c_self = app.add_subcommand("selftest", "run the invariant suites");
  c_self->add_option("--threads", self.threads, "worker threads, 0 = all available")->capture_default_str();
  c_self->add_option("--convention", self.convention, "divisor-sum weighting; a is a fault mode")
      ->check(CLI::IsMember({"a", "sqrt-a"}))
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidFlags;
  }

  if (c_eval->parsed()) return cmd_eval(eval, out, err);
  if (c_compare->parsed()) return cmd_compare(eval, out, err);
  if (c_scan->parsed()) return cmd_scan(scan, out, err);
  return cmd_selftest(self, out, err);
}

}  // namespace qlf::cli
