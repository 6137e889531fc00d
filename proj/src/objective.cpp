#include "rarn/objective.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace rarn {

namespace {

void track_product(Counters& counters, const Vec& v, const Vec& hv) {
  ++counters.hess_vec_products;
  double nv = v.norm();
  if (nv > 0.0) {
    counters.hess_norm_est = std::max(counters.hess_norm_est, hv.norm() / nv);
  }
}

double signed_pow(double t, double p) {
  return std::copysign(std::pow(std::abs(t), p), t);
}

}  // namespace

// ---------------------------------------------------------------------------
// RayleighProblem

RayleighProblem::RayleighProblem(Mat A)
    : A_(std::move(A)), sphere_(A_.rows()) {
  if (A_.rows() != A_.cols()) throw ContractViolation("rayleigh: A not square");
  if ((A_ - A_.transpose()).norm() > 1e-10 * std::max(1.0, A_.norm())) {
    throw ContractViolation("rayleigh: A not symmetric");
  }
}

double RayleighProblem::value(const Vec& x, Counters& counters) const {
  sphere_.check_point(x);
  ++counters.func_evals;
  return x.dot(A_ * x);
}

ObjectiveEval RayleighProblem::evaluate(const Point& x, Counters& counters) const {
  if (x.manifold != &sphere_) {
    throw ContractViolation("rayleigh: point not on the problem's sphere");
  }
  sphere_.check_point(x.coords);
  ++counters.func_evals;
  ++counters.grad_evals;

  const Vec xc = x.coords;
  const Vec Ax = A_ * xc;
  const double f = xc.dot(Ax);

  ObjectiveEval eval;
  eval.value = f;
  eval.gradient = make_tangent(x, 2.0 * (Ax - f * xc));

  // Riemannian Hessian on the sphere: projected Euclidean Hessian minus the
  // radial curvature correction <x, grad_euc f> v; for v tangent this is
  // H v = 2 (A v - (x'A v) x) - 2 (x'A x) v.
  const Mat* A = &A_;
  Counters* ctr = &counters;
  eval.hess_vec = [A, xc, f, ctr](const Vec& v) -> Vec {
    Vec Av = (*A) * v;
    Vec hv = 2.0 * (Av - xc.dot(Av) * xc) - 2.0 * f * v;
    track_product(*ctr, v, hv);
    return hv;
  };
  return eval;
}

// ---------------------------------------------------------------------------
// HolderWellProblem

HolderWellProblem::HolderWellProblem(Vec center, double mu, Mat B)
    : center_(std::move(center)),
      mu_(mu),
      B_(std::move(B)),
      space_(center_.size()) {
  if (mu_ <= 0.0 || mu_ > 1.0) {
    throw ContractViolation("holder_well: mu must lie in (0, 1]");
  }
  if (B_.rows() != B_.cols() || B_.rows() != center_.size()) {
    throw ContractViolation("holder_well: B has wrong shape");
  }
  if ((B_ - B_.transpose()).norm() > 1e-10 * std::max(1.0, B_.norm())) {
    throw ContractViolation("holder_well: B not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(B_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() >= 0.0) {
    throw ContractViolation("holder_well: B must have a negative eigenvalue");
  }
}

double HolderWellProblem::value(const Vec& x, Counters& counters) const {
  space_.check_point(x);
  ++counters.func_evals;
  double p = 2.0 + mu_;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += std::pow(std::abs(x[i] - center_[i]), p) / p;
  }
  return s + 0.5 * x.dot(B_ * x);
}

ObjectiveEval HolderWellProblem::evaluate(const Point& x, Counters& counters) const {
  if (x.manifold != &space_) {
    throw ContractViolation("holder_well: point not in the problem's space");
  }
  space_.check_point(x.coords);
  ++counters.func_evals;
  ++counters.grad_evals;

  const Vec xc = x.coords;
  const Vec d = xc - center_;
  const double p = 2.0 + mu_;

  double f = 0.5 * xc.dot(B_ * xc);
  Vec grad = B_ * xc;
  Vec hdiag(xc.size());
  for (Eigen::Index i = 0; i < xc.size(); ++i) {
    f += std::pow(std::abs(d[i]), p) / p;
    grad[i] += signed_pow(d[i], 1.0 + mu_);
    hdiag[i] = (1.0 + mu_) * std::pow(std::abs(d[i]), mu_);
  }

  ObjectiveEval eval;
  eval.value = f;
  eval.gradient = make_tangent(x, std::move(grad));

  const Mat* B = &B_;
  Counters* ctr = &counters;
  eval.hess_vec = [B, hdiag, ctr](const Vec& v) -> Vec {
    Vec hv = hdiag.cwiseProduct(v) + (*B) * v;
    track_product(*ctr, v, hv);
    return hv;
  };
  return eval;
}

Mat HolderWellProblem::dense_hessian(const Vec& x) const {
  Mat H = B_;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    H(i, i) += (1.0 + mu_) * std::pow(std::abs(x[i] - center_[i]), mu_);
  }
  return H;
}

// ---------------------------------------------------------------------------
// Finite-difference validators

double check_gradient_fd(const Problem& problem, const Point& x,
                         std::mt19937_64& rng, int directions, double h) {
  Counters scratch;
  ObjectiveEval eval = problem.evaluate(x, scratch);
  const Manifold& m = problem.manifold();
  double worst = 0.0;
  for (int i = 0; i < directions; ++i) {
    Vec v = m.random_unit_tangent(x.coords, rng);
    Vec xp = m.retract(x.coords, h * v, RetractionKind::Exponential);
    Vec xm = m.retract(x.coords, -h * v, RetractionKind::Exponential);
    double fd = (problem.value(xp, scratch) - problem.value(xm, scratch)) / (2.0 * h);
    double analytic = eval.gradient.coords.dot(v);
    double scale = std::max({1.0, std::abs(fd), std::abs(analytic)});
    worst = std::max(worst, std::abs(fd - analytic) / scale);
  }
  return worst;
}

double check_hessvec_fd(const Problem& problem, const Point& x,
                        std::mt19937_64& rng, int directions, double h) {
  Counters scratch;
  ObjectiveEval eval = problem.evaluate(x, scratch);
  const Manifold& m = problem.manifold();
  double worst = 0.0;
  for (int i = 0; i < directions; ++i) {
    Vec v = m.random_unit_tangent(x.coords, rng);
    Vec xp = m.retract(x.coords, h * v, RetractionKind::Exponential);
    Vec xm = m.retract(x.coords, -h * v, RetractionKind::Exponential);
    Point pp = make_point(m, xp);
    Point pm = make_point(m, xm);
    Vec gp = problem.evaluate(pp, scratch).gradient.coords;
    Vec gm = problem.evaluate(pm, scratch).gradient.coords;
    // transport both gradients back to T_x before differencing
    Vec fd = (m.transport(xp, x.coords, gp) - m.transport(xm, x.coords, gm)) / (2.0 * h);
    Vec analytic = eval.hess_vec(v);
    double scale = std::max({1.0, fd.norm(), analytic.norm()});
    worst = std::max(worst, (fd - analytic).norm() / scale);
  }
  return worst;
}

}  // namespace rarn
