#ifndef RARN_RAR_HPP
#define RARN_RAR_HPP

#include "rarn/meo.hpp"
#include "rarn/model.hpp"
#include "rarn/objective.hpp"
#include "rarn/report.hpp"

#include <map>
#include <optional>
#include <random>
#include <variant>

namespace rarn {

/// Adaptive 2+omega regularization parameters. Defaults follow conventional
/// adaptive-regularization practice; only the orderings are mandatory.
struct RarConfig {
  double eps_g = 1e-6;
  double eps_h = 1e-3;
  double omega = 1.0;
  double theta1 = 1.0;
  double theta2 = 1.0;
  double kappa1 = 0.5;
  double kappa2 = 2.0;
  double kappa3 = 4.0;
  double sigma_lower = 1e-4;
  double sigma0 = 1.0;
  double rho1 = 0.1;
  double rho2 = 0.9;
  double c_sub = 50.0;
  double delta = 0.05;
  double c_meo = 4.0;
  double perturb_rel = 1e-6;
  long long max_outer = 10000;
  RetractionKind retraction = RetractionKind::Projection;

  void validate() const;
  std::map<std::string, std::string> echo() const;

  /// Subproblem iteration cap ceil(c_sub * eps_h^{-1/2}).
  long long subproblem_cap() const;
};

struct RarState {
  Point x;
  double sigma = 1.0;
  long long k = 0;
  double sigma_max_seen = 1.0;
};

/// Regularization update: shrink toward sigma_lower on very successful
/// steps, hold on successful ones, expand by kappa2 otherwise.
double rar_sigma_update(double sigma, double rho_value, const RarConfig& config);
bool rar_accepts(double rho_value, const RarConfig& config);

/// A step produced by the subproblem process.
struct RarStep {
  Tangent eta;
  double model_decrease = 0.0;   // m(0) - m(eta) with the true Hessian
  double mbar_decrease = 0.0;    // decrease of the model the solver minimized
  long long inner_iters = 0;
  bool regularized = false;      // solved with H + 2 eps_h I
  double lambda_min_estimate = 0.0;
};

/// Outer-loop termination signalled by the subproblem process.
struct RarTerminate {
  bool from_meo = false;
  double lambda_est = 0.0;
};

using RarSubproblemResult = std::variant<RarStep, RarTerminate>;

/// Capped Krylov subproblem process with a perturbed basis. Exits early on
/// the residual criterion (first-order mode) or the minimum-decrease
/// criterion; exhausting the cap either terminates the outer algorithm
/// (small gradient) or falls back to a re-solve with the regularized
/// operator H + 2 eps_h I under the residual criterion alone. With a small
/// gradient and an early exit, an MEO decides between terminating and
/// continuing with the Krylov step.
RarSubproblemResult rar_subproblem(const ObjectiveEval& eval, double sigma,
                                   double sigma_bar, const RarConfig& config,
                                   Counters& counters, std::mt19937_64& rng,
                                   std::vector<std::string>* warnings);

enum class StepDisposition { Accepted, Rejected, Terminated };

struct RarStepResult {
  StepDisposition disposition = StepDisposition::Rejected;
  Certificate certificate;
};

/// One outer iteration: evaluate (or reuse the cached evaluation), run the
/// subproblem, form rho from the unregularized model decrease, adapt sigma,
/// and accept or reject. Appends one record unless the run terminated.
RarStepResult rar_step(RarState& state, const RarConfig& config,
                       const Problem& problem, Counters& counters,
                       std::mt19937_64& rng, RunReport& report,
                       std::optional<ObjectiveEval>& eval_cache);

RunReport rar_solve(const Problem& problem, const RarConfig& config,
                    const Point& x0, std::uint64_t seed);

}  // namespace rarn

#endif  // RARN_RAR_HPP
