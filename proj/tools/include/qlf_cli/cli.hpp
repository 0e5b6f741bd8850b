#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qlf/pipeline.hpp"

namespace qlf::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidFlags = 2,
  kBudgetInfeasible = 3,
  kIoFailure = 4,
};

struct EvalOptions {
  std::int64_t q_min = 10000;
  std::int64_t q_width = 4999;
  double t = 0.0;
  double epsilon = 1e-6;
  std::string method = "fast";  // fast | direct
  std::string format = "csv";   // csv | json
  std::string out;              // empty: stdout
  unsigned threads = 1;
  std::string cache;            // empty: no coefficient cache
  std::string convention = "sqrt-a";  // sqrt-a | a
};

struct ScanOptions {
  EvalOptions eval;
  double t_min = 0.0;
  double t_max = 0.0;
  double t_step = 0.1;
};

struct SelftestOptions {
  unsigned threads = 1;
  std::string convention = "sqrt-a";
};

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err);
int cmd_selftest(const SelftestOptions& opts, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and dispatches to a subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

BatchRequest make_request(const EvalOptions& opts, Method method);

struct SignChange {
  std::int64_t q = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool certified = false;  // both |Z| above 2 epsilon
};

// runs[i] holds the records of t-grid point ts[i]; every run covers the same q.
std::vector<SignChange> find_sign_changes(const std::vector<double>& ts,
                                          const std::vector<std::vector<BatchRecord>>& runs,
                                          double epsilon);

std::vector<double> t_grid(double t_min, double t_max, double t_step);

void write_csv(std::ostream& os, const std::vector<BatchRecord>& records, const std::string& method);
void write_json(std::ostream& os, const std::vector<BatchRecord>& records, const std::string& method);

// 17 significant digits.
std::string format_real(double x);

}  // namespace qlf::cli
