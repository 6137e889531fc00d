#include "rarn/rar.hpp"

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

/// Unregularized reduced decrease m(0) - m(Qu) for the operator behind T;
/// `shift` removes an additive multiple of the identity folded into T.
double reduced_decrease(const Vec& gt, const Vec& diag, const Vec& off,
                        const Vec& u, double shift) {
  double quad = u.dot(tridiag_apply(diag, off, u)) - shift * u.squaredNorm();
  return -(gt.dot(u) + 0.5 * quad);
}

struct LoopExit {
  bool hit_criterion = false;
  Vec u;
  int order = 0;
  double lambda_min = 0.0;
  long long iters = 0;
};

}  // namespace

void RarConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractViolation("rar config: " + msg); };
  if (!(eps_g > 0.0 && eps_g <= 1.0)) fail("eps_g must lie in (0, 1]");
  if (!(eps_h > 0.0 && eps_h <= 1.0)) fail("eps_h must lie in (0, 1]");
  if (!(omega > 0.0 && omega <= 1.0)) fail("omega must lie in (0, 1]");
  if (!(theta1 > 0.0 && theta1 <= 1.0)) fail("theta1 must lie in (0, 1]");
  if (!(theta2 > 0.0 && theta2 <= 1.0)) fail("theta2 must lie in (0, 1]");
  if (!(kappa3 > kappa2 && kappa2 >= 1.0 && 1.0 > kappa1 && kappa1 > 0.0)) {
    fail("need kappa3 > kappa2 >= 1 > kappa1 > 0");
  }
  if (!(sigma_lower > 0.0)) fail("sigma_lower must be positive");
  if (!(sigma0 >= sigma_lower)) fail("sigma0 must be at least sigma_lower");
  if (!(1.0 > rho2 && rho2 >= rho1 && rho1 > 0.0)) {
    fail("need 1 > rho2 >= rho1 > 0");
  }
  if (!(c_sub > 0.0)) fail("c_sub must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(c_meo > 0.0)) fail("c_meo must be positive");
  if (!(perturb_rel > 0.0)) fail("perturb_rel must be positive");
  if (max_outer < 1) fail("max_outer must be at least 1");
}

std::map<std::string, std::string> RarConfig::echo() const {
  return {{"solver", "rar"},
          {"eps_g", fmt(eps_g)},
          {"eps_h", fmt(eps_h)},
          {"omega", fmt(omega)},
          {"theta1", fmt(theta1)},
          {"theta2", fmt(theta2)},
          {"kappa1", fmt(kappa1)},
          {"kappa2", fmt(kappa2)},
          {"kappa3", fmt(kappa3)},
          {"sigma_lower", fmt(sigma_lower)},
          {"sigma0", fmt(sigma0)},
          {"rho1", fmt(rho1)},
          {"rho2", fmt(rho2)},
          {"c_sub", fmt(c_sub)},
          {"delta", fmt(delta)},
          {"c_meo", fmt(c_meo)},
          {"perturb_rel", fmt(perturb_rel)},
          {"max_outer", std::to_string(max_outer)},
          {"retraction",
           retraction == RetractionKind::Exponential ? "exponential" : "projection"}};
}

long long RarConfig::subproblem_cap() const {
  return static_cast<long long>(std::ceil(c_sub / std::sqrt(eps_h)));
}

double rar_sigma_update(double sigma, double rho_value, const RarConfig& config) {
  if (rho_value > config.rho2) {
    return std::max(config.sigma_lower, config.kappa1 * sigma);
  }
  if (rho_value >= config.rho1) return sigma;
  return config.kappa2 * sigma;
}

bool rar_accepts(double rho_value, const RarConfig& config) {
  return rho_value >= config.rho1;
}

RarSubproblemResult rar_subproblem(const ObjectiveEval& eval, double sigma,
                                   double sigma_bar, const RarConfig& config,
                                   Counters& counters, std::mt19937_64& rng,
                                   std::vector<std::string>* warnings) {
  const Tangent& g = eval.gradient;
  const double g_norm = g.norm();
  const bool first_order = g_norm > config.eps_g;
  const long long cap = config.subproblem_cap();
  const double tcd_threshold =
      decrease_threshold(config.omega, config.eps_h, sigma_bar);

  KrylovState state = KrylovState::init_basis(g, /*perturb=*/true,
                                              config.perturb_rel, config.eps_g, rng);

  LoopExit exit;
  double mbar_prev = std::numeric_limits<double>::infinity();
  double first_norm = -1.0;
  double model_dec = 0.0, mbar_dec = 0.0;

  for (long long jj = 1; jj <= cap; ++jj) {
    if (!state.extend(eval.hess_vec)) break;
    ++exit.iters;
    const int j = state.order();
    const Vec diag = state.diag_head(j);
    const Vec off = state.off_head(j);
    const Vec gt = state.reduced_gradient(j);
    ReducedSolution red = solve_reduced_ar(diag, off, gt, sigma, config.omega);
    const double un = red.u.norm();
    exit.lambda_min = tridiag::min_eigenvalue(diag, off);

    const double mbar =
        gt.dot(red.u) + 0.5 * red.u.dot(tridiag_apply(diag, off, red.u)) +
        phi_value(ArPower{sigma, config.omega}, un);
    const double scale = std::max(1.0, std::abs(eval.value));
    if (mbar > mbar_prev + 1e-10 * scale) {
      detail::warn(warnings, -1, "subspace solution value increased with the order");
    }
    mbar_prev = mbar;
    if (first_norm < 0.0) {
      first_norm = un;
    } else if (first_norm > un + 1e-10 * std::max(1.0, un)) {
      detail::warn(warnings, -1, "first subspace step longer than a later one");
    }

    const double dec = reduced_decrease(gt, diag, off, red.u, 0.0);
    bool residual_ok = false;
    if (first_order && un > 0.0) {
      Vec r_red = tridiag_apply(diag, off, red.u) + gt +
                  sigma * std::pow(un, config.omega) * red.u;
      double rn = detail::full_residual_norm(state, j, red.u, r_red);
      residual_ok = rn <= std::pow(un, 1.0 + config.theta1);
    }
    // the minimum-decrease exit stands in for the curvature criterion and
    // applies in the small-gradient regime; in the first-order regime the
    // residual criterion governs, otherwise its tiny threshold would stop
    // every solve at the Cauchy order
    const bool decrease_ok = !first_order && dec >= tcd_threshold;
    if (residual_ok || decrease_ok) {
      exit.hit_criterion = true;
      exit.u = red.u;
      exit.order = j;
      model_dec = dec;
      mbar_dec = -mbar;
      break;
    }
    if (state.invariant_subspace()) break;  // the solution can no longer change
  }

  if (!exit.hit_criterion) {
    if (!first_order) {
      // subspace cap exhausted with a small gradient: the operator is
      // approximately positive semidefinite with high probability
      return RarTerminate{/*from_meo=*/false, exit.lambda_min};
    }
    // re-solve with the regularized operator under the residual criterion
    const HessVecFn base_hv = eval.hess_vec;
    const double shift = 2.0 * config.eps_h;
    HessVecFn shifted = [base_hv, shift](const Vec& v) -> Vec {
      return base_hv(v) + shift * v;
    };
    KrylovState rstate =
        KrylovState::init_basis(g, /*perturb=*/false, 0.0, config.eps_g, rng);
    Vec u_last;
    int j_last = 0;
    bool met = false;
    for (long long jj = 1; jj <= cap; ++jj) {
      if (!rstate.extend(shifted)) break;
      ++exit.iters;
      const int j = rstate.order();
      const Vec diag = rstate.diag_head(j);
      const Vec off = rstate.off_head(j);
      const Vec gt = rstate.reduced_gradient(j);
      ReducedSolution red = solve_reduced_ar(diag, off, gt, sigma, config.omega);
      const double un = red.u.norm();
      u_last = red.u;
      j_last = j;
      if (un > 0.0) {
        Vec r_red = tridiag_apply(diag, off, red.u) + gt +
                    sigma * std::pow(un, config.omega) * red.u;
        if (detail::full_residual_norm(rstate, j, red.u, r_red) <=
            std::pow(un, 1.0 + config.theta1)) {
          met = true;
          break;
        }
      }
      if (rstate.invariant_subspace()) break;
    }
    if (j_last == 0) {
      throw InvariantViolation("regularized subproblem produced no solution");
    }
    if (!met) {
      detail::warn(warnings, -1,
                   "regularized re-solve exhausted its cap without meeting the residual criterion");
    }
    const Vec diag = rstate.diag_head(j_last);
    const Vec off = rstate.off_head(j_last);
    const Vec gt = rstate.reduced_gradient(j_last);
    RarStep step;
    step.eta = rstate.lift(u_last);
    step.model_decrease = reduced_decrease(gt, diag, off, u_last, shift);
    step.mbar_decrease =
        reduced_decrease(gt, diag, off, u_last, 0.0) -
        phi_value(ArPower{sigma, config.omega}, u_last.norm());
    step.inner_iters = exit.iters;
    step.regularized = true;
    step.lambda_min_estimate = tridiag::min_eigenvalue(diag, off);
    return step;
  }

  if (!first_order) {
    MeoConfig meo_cfg{config.eps_h, config.delta, config.c_meo};
    MeoOutcome outcome = meo_run(eval.hess_vec, g, meo_cfg, rng, counters);
    if (meo_certified(outcome)) {
      return RarTerminate{/*from_meo=*/true, meo_lambda_estimate(outcome)};
    }
    // curvature exists: keep iterating with the Krylov step, which met the
    // minimum-decrease criterion
  }

  RarStep step;
  step.eta = state.lift(exit.u);
  step.model_decrease = model_dec;
  step.mbar_decrease = mbar_dec;
  step.inner_iters = exit.iters;
  step.regularized = false;
  step.lambda_min_estimate = exit.lambda_min;
  return step;
}

namespace {

/// Hard assertion: the step must match the Cauchy point of the model the
/// solver minimized, with slack covering floating point and the basis
/// perturbation bias.
void assert_cauchy_condition(const ObjectiveEval& eval, const RarStep& step,
                             double sigma, const RarConfig& config,
                             Counters& counters) {
  ObjectiveEval shifted_eval = eval;
  if (step.regularized) {
    const HessVecFn base_hv = eval.hess_vec;
    const double shift = 2.0 * config.eps_h;
    shifted_eval.hess_vec = [base_hv, shift](const Vec& v) -> Vec {
      return base_hv(v) + shift * v;
    };
  }
  ModelAt model{&shifted_eval, ArPower{sigma, config.omega}};
  const double g_norm = eval.gradient.norm();
  const double zeta = config.perturb_rel * std::max(g_norm, config.eps_g);
  const double beta = counters.hess_norm_est + 2.0 * config.eps_h;
  const double s = step.eta.norm();
  double extra = 0.0;
  if (g_norm > 0.0) {
    extra = 8.0 * (zeta * zeta / g_norm * s + zeta * beta * s * s / g_norm);
  }
  if (!check_cauchy_criterion(model, step.eta, extra)) {
    throw InvariantViolation("step fails the Cauchy comparison");
  }
}

void finalize(RunReport& report, RunStatus status, double f, double grad_norm,
              const Point& x, Counters& counters) {
  report.status = status;
  report.final_f = f;
  report.final_grad_norm = grad_norm;
  report.final_x = x.coords;
  report.set_counters(counters);
}

}  // namespace

RarStepResult rar_step(RarState& state, const RarConfig& config,
                       const Problem& problem, Counters& counters,
                       std::mt19937_64& rng, RunReport& report,
                       std::optional<ObjectiveEval>& eval_cache) {
  state.sigma_max_seen = std::max(state.sigma_max_seen, state.sigma);

  if (!eval_cache.has_value()) {
    eval_cache = problem.evaluate(state.x, counters);
  }
  const ObjectiveEval& eval = *eval_cache;
  const double g_norm = eval.gradient.norm();

  const long long hv_before = counters.hess_vec_products;
  RarSubproblemResult sub = rar_subproblem(eval, state.sigma, state.sigma_max_seen,
                                           config, counters, rng, &report.warnings);

  if (const auto* term = std::get_if<RarTerminate>(&sub)) {
    RarStepResult result;
    result.disposition = StepDisposition::Terminated;
    if (term->from_meo) {
      result.certificate =
          Certificate{true, "meo", term->lambda_est, config.delta};
    } else {
      // attach an oracle certificate to the exhaustion-based termination
      MeoConfig meo_cfg{config.eps_h, config.delta, config.c_meo};
      MeoOutcome outcome = meo_run(eval.hess_vec, eval.gradient, meo_cfg, rng, counters);
      if (meo_certified(outcome)) {
        result.certificate =
            Certificate{true, "meo", meo_lambda_estimate(outcome), config.delta};
      } else {
        detail::warn(&report.warnings, state.k,
                     "exhaustion-based termination contradicted by the eigenvalue oracle");
        result.certificate =
            Certificate{false, "krylov_exhaustion", term->lambda_est, config.delta};
      }
    }
    finalize(report, RunStatus::Converged, eval.value, g_norm, state.x, counters);
    return result;
  }

  RarStep step = std::get<RarStep>(sub);
  assert_cauchy_condition(eval, step, state.sigma, config, counters);

  // per-iteration product budget: main loop + re-solve caps, two oracle
  // calls (stationarity test and certificate), and the Cauchy assertion
  const long long budget = 2 * config.subproblem_cap() +
                           2 * meo_budget(MeoConfig{config.eps_h, config.delta, config.c_meo},
                                          problem.manifold().intrinsic_dim()) +
                           4;
  if (counters.hess_vec_products - hv_before > budget) {
    throw InvariantViolation("subproblem exceeded its Hessian-vector product budget");
  }

  const double step_norm = step.eta.norm();
  const double sigma = state.sigma;

  // estimate-based diagnostics (warnings only; the bound constants are
  // empirical running estimates)
  {
    const double beta = counters.hess_norm_est + (step.regularized ? 2.0 * config.eps_h : 0.0);
    const double grad_bound =
        beta * step_norm + sigma * std::pow(step_norm, 1.0 + config.omega);
    if (g_norm > grad_bound * (1.0 + 1e-8) + 1e-14) {
      detail::warn(&report.warnings, state.k,
                   "gradient norm exceeds the step-size gradient bound");
    }
    if (!step.regularized) {
      const double cap1 = std::pow(3.0 * (beta + 1.0) / sigma, 1.0 / config.omega);
      const double cap2 = std::min(
          g_norm, std::pow(6.0 * g_norm / sigma, 1.0 / (1.0 + config.omega)));
      if (step_norm > std::max(cap1, cap2) * (1.0 + 1e-8) + 1e-14) {
        detail::warn(&report.warnings, state.k, "step length exceeds its theoretical cap");
      }
    }
    const double denom =
        4.0 * std::max(beta, std::pow(sigma, 1.0 / (1.0 + config.omega)) *
                                 std::pow(g_norm, config.omega / (1.0 + config.omega)));
    if (denom > 0.0 &&
        step.mbar_decrease < g_norm * g_norm / denom - 1e-10 * std::max(1.0, std::abs(eval.value))) {
      detail::warn(&report.warnings, state.k,
                   "regularized model decrease below the Cauchy lower bound");
    }
  }

  // decrease identity m(0) - m(eta) >= phi(eta): hard assertion
  {
    const double phi = phi_value(ArPower{sigma, config.omega}, step_norm);
    if (step.model_decrease < phi - 1e-10 * std::max(1.0, std::abs(eval.value))) {
      throw InvariantViolation("model decrease below the regularizer value");
    }
  }

  const Point x_trial = retract(state.x, step.eta, config.retraction);
  const double f_trial = problem.value(x_trial.coords, counters);
  const double rho_value = rho(eval.value, f_trial, step.model_decrease);
  const bool accept = rar_accepts(rho_value, config);

  IterationRecord rec;
  rec.k = state.k;
  rec.grad_norm = g_norm;
  rec.f = eval.value;
  rec.reg_param = sigma;
  rec.step_norm = step_norm;
  rec.rho = rho_value;
  rec.success = accept;
  rec.subproblem_iters = step.inner_iters;
  rec.model_decrease = step.model_decrease;
  rec.beta_h_est = counters.hess_norm_est;
  rec.step_kind = step.regularized ? "krylov_regularized" : "krylov";

  state.sigma = rar_sigma_update(sigma, rho_value, config);
  state.sigma_max_seen = std::max(state.sigma_max_seen, state.sigma);
  if (accept) {
    state.x = x_trial;
    eval_cache.reset();
  }
  ++state.k;

  rec.hv_cumulative = counters.hess_vec_products;
  report.records.push_back(std::move(rec));

  RarStepResult result;
  result.disposition = accept ? StepDisposition::Accepted : StepDisposition::Rejected;
  return result;
}

RunReport rar_solve(const Problem& problem, const RarConfig& config,
                    const Point& x0, std::uint64_t seed) {
  config.validate();
  if (x0.manifold != &problem.manifold()) {
    throw ContractViolation("rar: start point is not on the problem's manifold");
  }
  problem.manifold().check_point(x0.coords);

  RunReport report;
  report.solver = "rar";
  report.problem = problem.name();
  report.seed = seed;
  report.config_echo = config.echo();

  Counters counters;
  std::mt19937_64 rng(seed);
  RarState state{x0, config.sigma0, 0, config.sigma0};
  std::optional<ObjectiveEval> cache;

  while (true) {
    if (state.k >= config.max_outer) {
      if (!cache.has_value()) cache = problem.evaluate(state.x, counters);
      finalize(report, RunStatus::BudgetExhausted, cache->value,
               cache->gradient.norm(), state.x, counters);
      break;
    }
    RarStepResult res = rar_step(state, config, problem, counters, rng, report, cache);
    if (res.disposition == StepDisposition::Terminated) {
      report.certificate = res.certificate;
      break;
    }
  }
  return report;
}

}  // namespace rarn
