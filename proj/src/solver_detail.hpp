#ifndef RARN_SOLVER_DETAIL_HPP
#define RARN_SOLVER_DETAIL_HPP

#include "rarn/krylov.hpp"
#include "rarn/tridiag.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace rarn::detail {

/// Exact norm of the full-space model gradient at the lifted order-j
/// solution, assembled orthogonally from the reduced stationarity residual
/// (in span), the Lanczos lookahead coupling plus the gradient's projection
/// onto the lookahead vector, and the gradient component outside the
/// explored span. The regularizer's contribution must already be folded
/// into `reduced_residual`.
inline double full_residual_norm(const KrylovState& state, int j, const Vec& u,
                                 const Vec& reduced_residual) {
  const double in_span2 = reduced_residual.squaredNorm();
  const Vec g_out = state.gradient_outside_span(j);
  const double beta = state.lookahead_beta(j);
  if (beta == 0.0) {
    return std::sqrt(in_span2 + g_out.squaredNorm());
  }
  const Vec& q_next = state.lookahead_vec(j);
  const double g_on_next = q_next.dot(g_out);
  const double next_comp = g_on_next + beta * u[u.size() - 1];
  const double rest2 = std::max(0.0, g_out.squaredNorm() - g_on_next * g_on_next);
  return std::sqrt(in_span2 + next_comp * next_comp + rest2);
}

/// Collects an estimate-based diagnostic; k < 0 marks messages raised inside
/// a subproblem, before the outer index is known.
inline void warn(std::vector<std::string>* sink, long long k, const std::string& what) {
  if (sink == nullptr) return;
  if (k < 0) {
    sink->push_back(what);
    return;
  }
  std::ostringstream os;
  os << "k=" << k << ": " << what;
  sink->push_back(os.str());
}

}  // namespace rarn::detail

#endif  // RARN_SOLVER_DETAIL_HPP
