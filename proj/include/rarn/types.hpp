#ifndef RARN_TYPES_HPP
#define RARN_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace rarn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Unit-operation counters threaded through all oracle calls. One instance
/// per solver run; concurrent runs must use separate instances.
struct Counters {
  long long func_evals = 0;
  long long grad_evals = 0;
  long long hess_vec_products = 0;
  long long meo_calls = 0;

  /// Running max of ||Hv|| / ||v|| over every Hessian-vector product seen.
  /// Empirical stand-in for the Hessian operator-norm bound; consumed only
  /// by diagnostic checks, never by the algorithms themselves.
  double hess_norm_est = 0.0;
};

/// Hessian-vector product in embedding coordinates, tangent at a fixed base
/// point. Applications increment the owning Counters.
using HessVecFn = std::function<Vec(const Vec&)>;

/// Violation of an algorithmic invariant that is asserted unconditionally
/// (as opposed to estimate-based checks, which only produce warnings).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contract violation at a module boundary (mismatched base points, wrong
/// manifold, invalid parameters).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rarn

#endif  // RARN_TYPES_HPP
