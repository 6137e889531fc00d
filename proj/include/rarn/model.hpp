#ifndef RARN_MODEL_HPP
#define RARN_MODEL_HPP

#include "rarn/objective.hpp"

#include <variant>

namespace rarn {

/// Power regularizer sigma/(2+omega) ||eta||^{2+omega}.
struct ArPower {
  double sigma;
  double omega;
};

/// Quadratic regularizer eps_h ||eta||^2 / 4 together with the hard
/// constraint ||eta|| <= radius (the constraint is not part of phi).
struct TrQuad {
  double eps_h;
  double radius;
};

using Regularizer = std::variant<ArPower, TrQuad>;

double phi_value(const Regularizer& reg, double step_norm);
double phi_grad_norm(const Regularizer& reg, double step_norm);
/// Smallest eigenvalue of the regularizer's Hessian at a step of this norm.
double phi_hess_min_eig(const Regularizer& reg, double step_norm);

/// The regularized model at one iterate: value, gradient and curvature of
/// f(x) + <eta, g> + <eta, H eta>/2 + phi(eta). Read-only over the wrapped
/// evaluation; safe to share within one outer iteration.
struct ModelAt {
  const ObjectiveEval* eval = nullptr;
  Regularizer reg;
};

struct TerminationParams {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double eps_g = 1e-6;
  double eps_h = 1e-3;
  double tcd_threshold = 0.0;
};

/// Regularized model value; spends exactly one Hessian-vector product.
/// Throws for TrQuad steps beyond the radius.
double model_value(const ModelAt& m, const Tangent& eta);

/// Unregularized quadratic model value (no phi, no radius check).
double model_value_unregularized(const ModelAt& m, const Tangent& eta);

/// Gradient of the regularized model; one Hessian-vector product.
Tangent model_grad(const ModelAt& m, const Tangent& eta);

/// Minimizer of the regularized model restricted to span{g}; returns the
/// zero tangent when g = 0. One Hessian-vector product.
Tangent cauchy_point(const ModelAt& m);

/// Relative decrease ratio (f_x - f_next) / model_decrease, where
/// model_decrease is the *unregularized* decrease m(0) - m(eta).
/// A nonpositive denominator yields -inf, which classifies the step
/// as unsuccessful downstream.
double rho(double f_x, double f_next, double model_decrease);

/// Residual criterion ||grad mbar(eta)|| <= ||eta||^{1+theta1}.
/// eta = 0 cannot satisfy it. One Hessian-vector product.
bool check_residual_criterion(const ModelAt& m, const Tangent& eta,
                              const TerminationParams& params);

/// Curvature criterion: Hess mbar(eta) >= -||eta||^{theta2} I, evaluated
/// with a subspace estimate of lambda_min(H).
bool check_curvature_criterion(const ModelAt& m, const Tangent& eta,
                               const TerminationParams& params,
                               double lambda_min_estimate);

/// Cauchy criterion mbar(eta) <= mbar(cauchy_point) + slack. The base slack
/// is 1e-12 on the objective scale; extra_slack accommodates perturbed-basis
/// solves. Two Hessian-vector products.
bool check_cauchy_criterion(const ModelAt& m, const Tangent& eta,
                            double extra_slack = 0.0);

/// Minimum-decrease criterion m(0) - m(eta) >= params.tcd_threshold
/// (power-regularized models only). One Hessian-vector product.
bool check_decrease_criterion(const ModelAt& m, const Tangent& eta,
                              const TerminationParams& params);

/// Threshold for the minimum-decrease criterion from the regularization
/// order, the curvature tolerance, and the running regularization bound.
double decrease_threshold(double alpha, double eps_h, double sigma_bar);

}  // namespace rarn

#endif  // RARN_MODEL_HPP
