#ifndef RARN_OBJECTIVE_HPP
#define RARN_OBJECTIVE_HPP

#include "rarn/manifold.hpp"
#include "rarn/types.hpp"

#include <memory>
#include <random>
#include <string>

namespace rarn {

/// Cached value / gradient / Hessian-vector oracle at one iterate.
///
/// `hess_vec` maps embedding coordinates of tangents at `gradient.base` to
/// embedding coordinates; it is linear and self-adjoint on that tangent
/// space, and every application increments the counters it was created with.
struct ObjectiveEval {
  double value = 0.0;
  Tangent gradient;
  HessVecFn hess_vec;

  const Point& base() const { return gradient.base; }
};

class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual const Manifold& manifold() const = 0;

  /// Objective value only (one func_eval).
  virtual double value(const Vec& x, Counters& counters) const = 0;

  /// Value, Riemannian gradient, and Hessian-vector operator at x
  /// (one func_eval plus one grad_eval; products are counted lazily).
  virtual ObjectiveEval evaluate(const Point& x, Counters& counters) const = 0;
};

/// f(x) = x^T A x on the unit sphere, A symmetric. Stationary points are the
/// eigenvectors of A; the global minimum value is the smallest eigenvalue.
/// The objective is C^{2,1} on the sphere.
class RayleighProblem final : public Problem {
 public:
  explicit RayleighProblem(Mat A);

  std::string name() const override { return "rayleigh"; }
  const Manifold& manifold() const override { return sphere_; }
  double value(const Vec& x, Counters& counters) const override;
  ObjectiveEval evaluate(const Point& x, Counters& counters) const override;

  const Mat& matrix() const { return A_; }

 private:
  Mat A_;
  Sphere sphere_;
};

/// f(x) = sum_i |x_i - a_i|^{2+mu} / (2+mu) + x^T B x / 2 on R^n, with
/// mu in (0, 1] and B symmetric indefinite. The Hessian is Holder continuous
/// of order exactly mu on the kink surfaces {x_i = a_i}.
class HolderWellProblem final : public Problem {
 public:
  HolderWellProblem(Vec center, double mu, Mat B);

  std::string name() const override { return "holder_well"; }
  const Manifold& manifold() const override { return space_; }
  double value(const Vec& x, Counters& counters) const override;
  ObjectiveEval evaluate(const Point& x, Counters& counters) const override;

  double mu() const { return mu_; }
  const Vec& center() const { return center_; }
  const Mat& quadratic() const { return B_; }

  /// Hessian as a dense matrix at x (test/diagnostic use; uncounted).
  Mat dense_hessian(const Vec& x) const;

 private:
  Vec center_;
  double mu_;
  Mat B_;
  EuclideanSpace space_;
};

/// Max relative error between <g, v> and a central finite difference of
/// f along retract(x, h v) over `directions` random unit tangents.
double check_gradient_fd(const Problem& problem, const Point& x,
                         std::mt19937_64& rng, int directions = 10,
                         double h = 1e-6);

/// Max relative error between H v and a central finite difference of the
/// gradient along the geodesic through x (with parallel-transport
/// correction), over random unit tangents.
double check_hessvec_fd(const Problem& problem, const Point& x,
                        std::mt19937_64& rng, int directions = 10,
                        double h = 1e-5);

}  // namespace rarn

#endif  // RARN_OBJECTIVE_HPP
