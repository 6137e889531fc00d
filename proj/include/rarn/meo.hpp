#ifndef RARN_MEO_HPP
#define RARN_MEO_HPP

#include "rarn/manifold.hpp"
#include "rarn/types.hpp"

#include <random>
#include <variant>

namespace rarn {

/// The operator is certified to satisfy H >= -eps_h I on the explored
/// subspace; wrong with probability at most the configured delta.
struct MeoCertified {
  double lambda_est = 0.0;
};

/// A unit tangent direction with <d, g> <= 0 and <d, H d> <= -eps_h / 2.
struct MeoNegativeCurvature {
  Tangent direction;
  double rayleigh = 0.0;
};

using MeoOutcome = std::variant<MeoCertified, MeoNegativeCurvature>;

struct MeoConfig {
  double eps_h = 1e-3;
  double delta = 0.05;
  double c_meo = 4.0;
};

/// Minimal eigenvalue oracle: Lanczos from a random unit tangent for at most
/// min(dim, ceil(c_meo * eps_h^{-1/2} * ln(dim / delta))) products. Returns a
/// negative-curvature direction as soon as a Ritz pair dips below -eps_h / 2
/// (re-verified by a direct Hessian-vector product and sign-aligned against
/// the gradient), otherwise certifies with the smallest Ritz value seen.
MeoOutcome meo_run(const HessVecFn& hess_vec, const Tangent& g,
                   const MeoConfig& config, std::mt19937_64& rng,
                   Counters& counters);

bool meo_certified(const MeoOutcome& outcome);
double meo_lambda_estimate(const MeoOutcome& outcome);

/// Product budget of one oracle call: the Lanczos growth cap, plus one
/// verification product when a direction is returned.
long long meo_budget(const MeoConfig& config, Eigen::Index intrinsic_dim);

}  // namespace rarn

#endif  // RARN_MEO_HPP
