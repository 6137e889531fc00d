#include "rarn/model.hpp"

#include <cmath>
#include <limits>

namespace rarn {

namespace {

const ObjectiveEval& eval_of(const ModelAt& m) {
  if (m.eval == nullptr) throw ContractViolation("model has no evaluation");
  return *m.eval;
}

void check_radius(const Regularizer& reg, double step_norm) {
  if (const auto* tr = std::get_if<TrQuad>(&reg)) {
    if (step_norm > tr->radius * (1.0 + 1e-12)) {
      throw ContractViolation("model step exceeds the trust region radius");
    }
  }
}

/// Positive root of -||g||^2 + t <g,Hg> + sigma t^{1+w} ||g||^{2+w} = 0.
/// The left side is convex in t, negative at 0 and unbounded above, so the
/// root is unique; safeguarded Newton with a bisection fallback.
double ar_cauchy_stepsize(double g_norm2, double gHg, double sigma,
                          double omega, double g_norm) {
  const double c = sigma * std::pow(g_norm, 2.0 + omega);
  auto deriv = [&](double t) {
    return -g_norm2 + t * gHg + c * std::pow(t, 1.0 + omega);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (deriv(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw InvariantViolation("cauchy step bracket diverged");
  }
  double t = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    double d = deriv(t);
    if (d < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double slope = gHg + c * (1.0 + omega) * std::pow(t, omega);
    double t_next = (slope > 0.0) ? t - d / slope : 0.5 * (lo + hi);
    if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
    if (std::abs(t_next - t) <= 1e-12 * std::max(1.0, t)) {
      t = t_next;
      break;
    }
    t = t_next;
  }
  return t;
}

}  // namespace

double phi_value(const Regularizer& reg, double step_norm) {
  if (const auto* ar = std::get_if<ArPower>(&reg)) {
    return ar->sigma / (2.0 + ar->omega) * std::pow(step_norm, 2.0 + ar->omega);
  }
  const auto& tr = std::get<TrQuad>(reg);
  return 0.25 * tr.eps_h * step_norm * step_norm;
}

double phi_grad_norm(const Regularizer& reg, double step_norm) {
  if (const auto* ar = std::get_if<ArPower>(&reg)) {
    return ar->sigma * std::pow(step_norm, 1.0 + ar->omega);
  }
  return 0.5 * std::get<TrQuad>(reg).eps_h * step_norm;
}

double phi_hess_min_eig(const Regularizer& reg, double step_norm) {
  if (const auto* ar = std::get_if<ArPower>(&reg)) {
    // Hess phi = sigma ||eta||^w (I + w eta eta^T / ||eta||^2); the minimum
    // eigenvalue is attained orthogonally to eta
    return ar->sigma * std::pow(step_norm, ar->omega);
  }
  return 0.5 * std::get<TrQuad>(reg).eps_h;
}

double model_value(const ModelAt& m, const Tangent& eta) {
  const ObjectiveEval& ev = eval_of(m);
  double nrm = eta.norm();
  check_radius(m.reg, nrm);
  Vec hv = ev.hess_vec(eta.coords);
  return ev.value + eta.coords.dot(ev.gradient.coords) +
         0.5 * eta.coords.dot(hv) + phi_value(m.reg, nrm);
}

double model_value_unregularized(const ModelAt& m, const Tangent& eta) {
  const ObjectiveEval& ev = eval_of(m);
  Vec hv = ev.hess_vec(eta.coords);
  return ev.value + eta.coords.dot(ev.gradient.coords) + 0.5 * eta.coords.dot(hv);
}

Tangent model_grad(const ModelAt& m, const Tangent& eta) {
  const ObjectiveEval& ev = eval_of(m);
  double nrm = eta.norm();
  Vec g = ev.gradient.coords + ev.hess_vec(eta.coords);
  if (const auto* ar = std::get_if<ArPower>(&m.reg)) {
    g += ar->sigma * std::pow(nrm, ar->omega) * eta.coords;
  } else {
    g += 0.5 * std::get<TrQuad>(m.reg).eps_h * eta.coords;
  }
  return make_tangent(ev.base(), std::move(g));
}

Tangent cauchy_point(const ModelAt& m) {
  const ObjectiveEval& ev = eval_of(m);
  const Vec& g = ev.gradient.coords;
  const double g_norm = g.norm();
  if (g_norm == 0.0) {
    return make_tangent(ev.base(), Vec::Zero(g.size()));
  }
  const double gHg = g.dot(ev.hess_vec(g));
  double t;
  if (const auto* ar = std::get_if<ArPower>(&m.reg)) {
    t = ar_cauchy_stepsize(g_norm * g_norm, gHg, ar->sigma, ar->omega, g_norm);
  } else {
    const auto& tr = std::get<TrQuad>(m.reg);
    double t_max = tr.radius / g_norm;
    double q = gHg + 0.5 * tr.eps_h * g_norm * g_norm;
    t = (q > 0.0) ? std::min(g_norm * g_norm / q, t_max) : t_max;
  }
  return make_tangent(ev.base(), Vec(-t * g));
}

double rho(double f_x, double f_next, double model_decrease) {
  if (!(model_decrease > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return (f_x - f_next) / model_decrease;
}

bool check_residual_criterion(const ModelAt& m, const Tangent& eta,
                              const TerminationParams& params) {
  double nrm = eta.norm();
  if (nrm == 0.0) return false;
  double residual = model_grad(m, eta).norm();
  return residual <= std::pow(nrm, 1.0 + params.theta1);
}

bool check_curvature_criterion(const ModelAt& m, const Tangent& eta,
                               const TerminationParams& params,
                               double lambda_min_estimate) {
  double nrm = eta.norm();
  double curvature_floor = lambda_min_estimate + phi_hess_min_eig(m.reg, nrm);
  return curvature_floor >= -std::pow(nrm, params.theta2);
}

bool check_decrease_criterion(const ModelAt& m, const Tangent& eta,
                              const TerminationParams& params) {
  if (!std::holds_alternative<ArPower>(m.reg)) {
    throw ContractViolation("minimum-decrease criterion requires a power regularizer");
  }
  const ObjectiveEval& ev = eval_of(m);
  double decrease = ev.value - model_value_unregularized(m, eta);
  return decrease >= params.tcd_threshold;
}

bool check_cauchy_criterion(const ModelAt& m, const Tangent& eta,
                            double extra_slack) {
  const ObjectiveEval& ev = eval_of(m);
  Tangent cp = cauchy_point(m);
  double slack = 1e-12 * std::max(1.0, std::abs(ev.value)) + extra_slack;
  return model_value(m, eta) <= model_value(m, cp) + slack;
}

double decrease_threshold(double alpha, double eps_h, double sigma_bar) {
  return alpha * std::pow(eps_h, (2.0 + alpha) / alpha) /
         (12.0 * std::pow(sigma_bar, 2.0 / alpha));
}

}  // namespace rarn
