#ifndef RARN_HARNESS_HPP
#define RARN_HARNESS_HPP

#include "rarn/config.hpp"
#include "rarn/report.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rarn {

struct RunSpec {
  std::string solver = "rar";  // rar | rtr
  std::shared_ptr<Problem> problem;
  RarConfig rar;
  RtrConfig rtr;
  std::string start = "random";
  std::uint64_t seed = 0;
};

RunReport run_solver(const RunSpec& spec);

/// RunSpec from a parsed config file (sections [run], [problem], and
/// [rar] or [rtr]); optional overrides replace file values.
RunSpec run_spec_from_config(const ConfigFile& cfg,
                             const std::optional<std::string>& solver_override,
                             const std::optional<std::string>& problem_override,
                             const std::optional<std::uint64_t>& seed_override);

struct SweepPoint {
  double eps_g = 0.0;
  double eps_h = 0.0;
  long long outer_iters = 0;
  long long succ_iters = 0;
  long long hv_products = 0;
  bool converged = false;
  double max_reg_param = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double iter_slope = 0.0;
  double hv_slope = 0.0;
  int fit_points = 0;
  bool partial = false;  // some points exhausted their budget
};

struct SweepSpec {
  RunSpec base;
  std::vector<double> eps_g_values;    // strictly decreasing
  std::vector<double> eps_h_values;    // empty: eps_h = eps_g^{alpha/(1+alpha)}
  double alpha = 1.0;
  std::uint64_t master_seed = 0;
};

/// Runs every epsilon point with an isolated state and a derived seed
/// (master_seed + index), then fits d log(count) / d log(1/eps_g) by least
/// squares over the converged points (at least 4 required for a fit).
SweepResult run_sweep(const SweepSpec& spec);

SweepSpec sweep_spec_from_config(const ConfigFile& cfg,
                                 const std::optional<std::string>& solver_override,
                                 const std::optional<std::uint64_t>& seed_override);

void write_sweep_csv(const SweepResult& result, std::ostream& os);

/// Least-squares slope of log(y) against log(x); NaN for fewer than two
/// points or a degenerate x spread.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rarn

#endif  // RARN_HARNESS_HPP
