#ifndef RARN_RTR_HPP
#define RARN_RTR_HPP

#include "rarn/meo.hpp"
#include "rarn/model.hpp"
#include "rarn/objective.hpp"
#include "rarn/rar.hpp"
#include "rarn/report.hpp"

#include <map>
#include <optional>
#include <random>
#include <variant>

namespace rarn {

struct RtrConfig {
  double eps_g = 1e-6;
  double eps_h = 1e-3;
  double theta1 = 1.0;
  double kappa1 = 0.25;
  double kappa2 = 2.0;
  double delta_max = 10.0;
  double delta0 = 1.0;
  double rho_accept = 0.05;  // in [0, 1/4)
  double c_sub = 50.0;
  double delta = 0.05;       // oracle failure probability
  double c_meo = 4.0;
  long long max_outer = 10000;
  RetractionKind retraction = RetractionKind::Projection;

  void validate() const;
  std::map<std::string, std::string> echo() const;
  long long subproblem_cap() const;
};

struct RtrState {
  Point x;
  double radius = 1.0;
  long long k = 0;
};

double rtr_radius_update(double radius, double rho_value, bool on_boundary,
                         const RtrConfig& config);
bool rtr_accepts(double rho_value, const RtrConfig& config);

struct RtrStep {
  Tangent eta;
  double model_decrease = 0.0;  // m(0) - m(eta) with the true Hessian
  long long inner_iters = 0;
  bool on_boundary = false;
  bool from_meo = false;
  double lambda = 0.0;  // boundary multiplier of the reduced solve
};

struct RtrTerminate {
  double lambda_est = 0.0;
  /// Set when the subproblem cap was exhausted and the oracle then
  /// certified anyway: a probabilistic contradiction, not convergence.
  bool contradiction = false;
};

using RtrSubproblemResult = std::variant<RtrStep, RtrTerminate>;

/// Trust-region subproblem process: with a small gradient the eigenvalue
/// oracle either certifies (terminate) or supplies a curvature step scaled
/// to the radius; otherwise a Lanczos-Krylov loop on the regularized
/// operator H + 2 eps_h I returns as soon as the step hits the boundary or
/// meets the residual criterion, falling back to an oracle step if the cap
/// is exhausted.
RtrSubproblemResult rtr_subproblem(const ObjectiveEval& eval, double radius,
                                   const RtrConfig& config, Counters& counters,
                                   std::mt19937_64& rng,
                                   std::vector<std::string>* warnings);

struct RtrStepResult {
  StepDisposition disposition = StepDisposition::Rejected;
  Certificate certificate;
  bool contradiction = false;
};

RtrStepResult rtr_step(RtrState& state, const RtrConfig& config,
                       const Problem& problem, Counters& counters,
                       std::mt19937_64& rng, RunReport& report,
                       std::optional<ObjectiveEval>& eval_cache);

RunReport rtr_solve(const Problem& problem, const RtrConfig& config,
                    const Point& x0, std::uint64_t seed);

}  // namespace rarn

#endif  // RARN_RTR_HPP
