#ifndef RARN_REPORT_HPP
#define RARN_REPORT_HPP

#include "rarn/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rarn {

/// One outer iteration in which a step was attempted. `reg_param` carries
/// sigma_k for adaptive regularization and the radius for trust region runs.
struct IterationRecord {
  long long k = 0;
  double grad_norm = 0.0;
  double f = 0.0;
  double reg_param = 0.0;
  double step_norm = 0.0;
  double rho = 0.0;
  bool success = false;
  long long subproblem_iters = 0;
  long long hv_cumulative = 0;
  double model_decrease = 0.0;
  double beta_h_est = 0.0;
  std::string step_kind;  // krylov | krylov_regularized | meo

  bool operator==(const IterationRecord&) const = default;
};

enum class RunStatus { Converged, BudgetExhausted };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

/// Second-order stationarity certificate attached to a converged run.
struct Certificate {
  bool present = false;
  std::string kind;  // meo | krylov_exhaustion
  double lambda_est = 0.0;
  double delta = 0.0;

  bool operator==(const Certificate&) const = default;
};

struct RunReport {
  std::string solver;
  std::string problem;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config_echo;

  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::BudgetExhausted;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  Vec final_x;
  Certificate certificate;

  long long func_evals = 0;
  long long grad_evals = 0;
  long long hess_vec_products = 0;
  long long meo_calls = 0;
  double beta_h_final = 0.0;

  std::vector<std::string> warnings;

  void set_counters(const Counters& c);
  bool operator==(const RunReport& other) const;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

/// Per-iteration trace with a fixed header row.
void write_trace_csv(const RunReport& report, std::ostream& os);

/// Re-checks a finished run from its trace: regularization/radius update
/// legality, objective monotonicity over accepted steps, the Cauchy decrease
/// inequality, the trust-region accepted-step decrease, step-size bound
/// flags, and counter conservation. Returns human-readable violations;
/// empty on a clean run.
std::vector<std::string> verify_invariants(const RunReport& report);

}  // namespace rarn

#endif  // RARN_REPORT_HPP
