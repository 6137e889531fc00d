#include "rarn/rtr.hpp"

#include "rarn/krylov.hpp"
#include "rarn/tridiag.hpp"
#include "solver_detail.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rarn {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RtrConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractViolation("rtr config: " + msg); };
  if (!(eps_g > 0.0 && eps_g <= 1.0)) fail("eps_g must lie in (0, 1]");
  if (!(eps_h > 0.0 && eps_h <= 1.0)) fail("eps_h must lie in (0, 1]");
  if (!(theta1 > 0.0 && theta1 <= 1.0)) fail("theta1 must lie in (0, 1]");
  if (!(kappa1 > 0.0 && kappa1 < 1.0)) fail("kappa1 must lie in (0, 1)");
  if (!(kappa2 >= 1.0)) fail("kappa2 must be at least 1");
  if (!(delta_max > 0.0)) fail("delta_max must be positive");
  if (!(delta0 > 0.0 && delta0 <= delta_max)) fail("delta0 must lie in (0, delta_max]");
  if (!(rho_accept >= 0.0 && rho_accept < 0.25)) fail("rho_accept must lie in [0, 1/4)");
  if (!(c_sub > 0.0)) fail("c_sub must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(c_meo > 0.0)) fail("c_meo must be positive");
  if (max_outer < 1) fail("max_outer must be at least 1");
}

std::map<std::string, std::string> RtrConfig::echo() const {
  return {{"solver", "rtr"},
          {"eps_g", fmt(eps_g)},
          {"eps_h", fmt(eps_h)},
          {"theta1", fmt(theta1)},
          {"kappa1", fmt(kappa1)},
          {"kappa2", fmt(kappa2)},
          {"delta_max", fmt(delta_max)},
          {"delta0", fmt(delta0)},
          {"rho_accept", fmt(rho_accept)},
          {"c_sub", fmt(c_sub)},
          {"delta", fmt(delta)},
          {"c_meo", fmt(c_meo)},
          {"max_outer", std::to_string(max_outer)},
          {"retraction",
           retraction == RetractionKind::Exponential ? "exponential" : "projection"}};
}

long long RtrConfig::subproblem_cap() const {
  return static_cast<long long>(std::ceil(c_sub / std::sqrt(eps_h)));
}

double rtr_radius_update(double radius, double rho_value, bool on_boundary,
                         const RtrConfig& config) {
  if (rho_value > 0.75 && on_boundary) {
    return std::min(config.delta_max, config.kappa2 * radius);
  }
  if (rho_value < 0.25) return config.kappa1 * radius;
  return radius;
}

bool rtr_accepts(double rho_value, const RtrConfig& config) {
  return rho_value >= config.rho_accept;
}

RtrSubproblemResult rtr_subproblem(const ObjectiveEval& eval, double radius,
                                   const RtrConfig& config, Counters& counters,
                                   std::mt19937_64& rng,
                                   std::vector<std::string>* warnings) {
  const Tangent& g = eval.gradient;
  const double g_norm = g.norm();
  const MeoConfig meo_cfg{config.eps_h, config.delta, config.c_meo};

  if (g_norm <= config.eps_g) {
    MeoOutcome outcome = meo_run(eval.hess_vec, g, meo_cfg, rng, counters);
    if (meo_certified(outcome)) {
      return RtrTerminate{meo_lambda_estimate(outcome), false};
    }
    const auto& nc = std::get<MeoNegativeCurvature>(outcome);
    RtrStep step;
    step.eta = make_tangent(g.base, Vec(radius * nc.direction.coords));
    step.model_decrease = -radius * nc.direction.coords.dot(g.coords) -
                          0.5 * radius * radius * nc.rayleigh;
    step.on_boundary = true;
    step.from_meo = true;
    return step;
  }

  // Lanczos on the regularized operator; the start vector is the gradient,
  // so the curvature step below is the only randomized path
  const HessVecFn base_hv = eval.hess_vec;
  const double shift = 2.0 * config.eps_h;
  HessVecFn shifted = [base_hv, shift](const Vec& v) -> Vec {
    return base_hv(v) + shift * v;
  };
  KrylovState state = KrylovState::init_basis(g, /*perturb=*/false, 0.0,
                                              config.eps_g, rng);
  const long long cap = config.subproblem_cap();
  long long iters = 0;
  double first_norm = -1.0;

  for (long long jj = 1; jj <= cap; ++jj) {
    if (!state.extend(shifted)) break;
    ++iters;
    const int j = state.order();
    const Vec diag = state.diag_head(j);
    const Vec off = state.off_head(j);
    const Vec gt = state.reduced_gradient(j);
    ReducedSolution red = solve_reduced_tr(diag, off, gt, radius);
    const double un = red.u.norm();

    if (!red.on_boundary) {
      if (first_norm < 0.0) {
        first_norm = un;
      } else if (first_norm > un + 1e-10 * std::max(1.0, un)) {
        detail::warn(warnings, -1, "first subspace step longer than a later one");
      }
    }

    bool truncated = red.on_boundary;
    bool residual_ok = false;
    if (!truncated && un > 0.0) {
      Vec r_red = tridiag_apply(diag, off, red.u) + gt + red.lambda * red.u;
      residual_ok = detail::full_residual_norm(state, j, red.u, r_red) <=
                    std::pow(un, 1.0 + config.theta1);
    }
    if (truncated || residual_ok) {
      // Cauchy comparison within the model the solver minimizes: the step
      // value may not exceed the best point along the gradient direction
      double mbar_u = gt.dot(red.u) + 0.5 * red.u.dot(tridiag_apply(diag, off, red.u));
      double d0 = diag[0];
      double tau_max = radius / g_norm;
      double tau = d0 > 0.0
                       ? std::min(1.0 / d0, tau_max)
                       : tau_max;
      // value of -tau * g in the regularized quadratic, using gt = |g| e1
      double cauchy_val = -tau * g_norm * gt[0] +
                          0.5 * tau * tau * g_norm * g_norm * d0;
      if (mbar_u > cauchy_val + 1e-10 * (1.0 + std::abs(cauchy_val))) {
        throw InvariantViolation("trust-region step fails the Cauchy comparison");
      }

      RtrStep step;
      step.eta = state.lift(red.u);
      // subtract the identity shift to return to the true-Hessian model
      double quad = red.u.dot(tridiag_apply(diag, off, red.u)) - shift * un * un;
      step.model_decrease = -(gt.dot(red.u) + 0.5 * quad);
      step.inner_iters = iters;
      step.on_boundary = truncated || un >= radius * (1.0 - 1e-12);
      step.lambda = red.lambda;
      return step;
    }
    if (state.invariant_subspace()) break;
  }

  // cap exhausted: the regularized operator is not comfortably positive
  // definite, so ask the oracle for a curvature direction
  MeoOutcome outcome = meo_run(eval.hess_vec, g, meo_cfg, rng, counters);
  if (meo_certified(outcome)) {
    detail::warn(warnings, -1,
                 "subproblem cap exhausted yet the oracle certified; terminating");
    return RtrTerminate{meo_lambda_estimate(outcome), true};
  }
  const auto& nc = std::get<MeoNegativeCurvature>(outcome);
  RtrStep step;
  step.eta = make_tangent(g.base, Vec(radius * nc.direction.coords));
  step.model_decrease = -radius * nc.direction.coords.dot(g.coords) -
                        0.5 * radius * radius * nc.rayleigh;
  step.inner_iters = iters;
  step.on_boundary = true;
  step.from_meo = true;
  return step;
}

namespace {

void finalize(RunReport& report, RunStatus status, double f, double grad_norm,
              const Point& x, Counters& counters) {
  report.status = status;
  report.final_f = f;
  report.final_grad_norm = grad_norm;
  report.final_x = x.coords;
  report.set_counters(counters);
}

}  // namespace

RtrStepResult rtr_step(RtrState& state, const RtrConfig& config,
                       const Problem& problem, Counters& counters,
                       std::mt19937_64& rng, RunReport& report,
                       std::optional<ObjectiveEval>& eval_cache) {
  if (!eval_cache.has_value()) {
    eval_cache = problem.evaluate(state.x, counters);
  }
  const ObjectiveEval& eval = *eval_cache;
  const double g_norm = eval.gradient.norm();

  const long long hv_before = counters.hess_vec_products;
  RtrSubproblemResult sub =
      rtr_subproblem(eval, state.radius, config, counters, rng, &report.warnings);

  if (const auto* term = std::get_if<RtrTerminate>(&sub)) {
    RtrStepResult result;
    result.disposition = StepDisposition::Terminated;
    result.contradiction = term->contradiction;
    result.certificate =
        Certificate{!term->contradiction, "meo", term->lambda_est, config.delta};
    finalize(report,
             term->contradiction ? RunStatus::BudgetExhausted : RunStatus::Converged,
             eval.value, g_norm, state.x, counters);
    return result;
  }

  RtrStep step = std::get<RtrStep>(sub);
  const double step_norm = step.eta.norm();
  const double radius = state.radius;

  const long long budget =
      config.subproblem_cap() +
      meo_budget(MeoConfig{config.eps_h, config.delta, config.c_meo},
                 problem.manifold().intrinsic_dim()) +
      4;
  if (counters.hess_vec_products - hv_before > budget) {
    throw InvariantViolation("subproblem exceeded its Hessian-vector product budget");
  }

  // hard decrease guarantees
  const double scale = std::max(1.0, std::abs(eval.value));
  if (step.from_meo) {
    if (step.model_decrease < 0.25 * config.eps_h * radius * radius - 1e-10 * scale) {
      throw InvariantViolation("oracle step decrease below eps_h/4 * radius^2");
    }
  }
  if (step.model_decrease <
      0.25 * config.eps_h * step_norm * step_norm - 1e-10 * scale) {
    throw InvariantViolation("model decrease below the quadratic regularizer value");
  }

  // interior steps inherit a gradient bound from the first subspace step
  if (!step.on_boundary) {
    const double beta = counters.hess_norm_est + 2.0 * config.eps_h;
    if (g_norm > beta * step_norm * (1.0 + 1e-8) + 1e-14) {
      detail::warn(&report.warnings, state.k,
                   "gradient norm exceeds the interior step bound");
    }
  }

  const Point x_trial = retract(state.x, step.eta, config.retraction);
  const double f_trial = problem.value(x_trial.coords, counters);
  const double rho_value = rho(eval.value, f_trial, step.model_decrease);
  const bool accept = rtr_accepts(rho_value, config);

  if (accept &&
      eval.value - f_trial <
          config.rho_accept * config.eps_h / 4.0 * step_norm * step_norm -
              1e-10 * scale) {
    throw InvariantViolation("accepted step decrease below its guaranteed floor");
  }

  IterationRecord rec;
  rec.k = state.k;
  rec.grad_norm = g_norm;
  rec.f = eval.value;
  rec.reg_param = radius;
  rec.step_norm = step_norm;
  rec.rho = rho_value;
  rec.success = accept;
  rec.subproblem_iters = step.inner_iters;
  rec.model_decrease = step.model_decrease;
  rec.beta_h_est = counters.hess_norm_est;
  rec.step_kind = step.from_meo ? "meo" : "krylov";

  const bool boundary_hit = step_norm >= radius * (1.0 - 1e-12);
  state.radius = rtr_radius_update(radius, rho_value, boundary_hit, config);
  if (accept) {
    state.x = x_trial;
    eval_cache.reset();
  }
  ++state.k;

  rec.hv_cumulative = counters.hess_vec_products;
  report.records.push_back(std::move(rec));

  RtrStepResult result;
  result.disposition = accept ? StepDisposition::Accepted : StepDisposition::Rejected;
  return result;
}

RunReport rtr_solve(const Problem& problem, const RtrConfig& config,
                    const Point& x0, std::uint64_t seed) {
  config.validate();
  if (x0.manifold != &problem.manifold()) {
    throw ContractViolation("rtr: start point is not on the problem's manifold");
  }
  problem.manifold().check_point(x0.coords);

  RunReport report;
  report.solver = "rtr";
  report.problem = problem.name();
  report.seed = seed;
  report.config_echo = config.echo();

  Counters counters;
  std::mt19937_64 rng(seed);
  RtrState state{x0, config.delta0, 0};
  std::optional<ObjectiveEval> cache;

  while (true) {
    if (state.k >= config.max_outer) {
      if (!cache.has_value()) cache = problem.evaluate(state.x, counters);
      finalize(report, RunStatus::BudgetExhausted, cache->value,
               cache->gradient.norm(), state.x, counters);
      break;
    }
    RtrStepResult res = rtr_step(state, config, problem, counters, rng, report, cache);
    if (res.disposition == StepDisposition::Terminated) {
      report.certificate = res.certificate;
      break;
    }
  }
  return report;
}

}  // namespace rarn
