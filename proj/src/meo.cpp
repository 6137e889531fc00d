#include "rarn/meo.hpp"

#include "rarn/krylov.hpp"
#include "rarn/tridiag.hpp"

#include <cmath>
#include <limits>

namespace rarn {

long long meo_budget(const MeoConfig& config, Eigen::Index intrinsic_dim) {
  double n = static_cast<double>(intrinsic_dim);
  double cap = std::ceil(config.c_meo / std::sqrt(config.eps_h) *
                         std::log(std::max(2.0, n / config.delta)));
  return static_cast<long long>(std::min(n, cap)) + 1;
}

MeoOutcome meo_run(const HessVecFn& hess_vec, const Tangent& g,
                   const MeoConfig& config, std::mt19937_64& rng,
                   Counters& counters) {
  if (!(config.eps_h > 0.0) || config.eps_h > 1.0) {
    throw ContractViolation("meo: eps_h must lie in (0, 1]");
  }
  if (!(config.delta > 0.0) || config.delta >= 1.0) {
    throw ContractViolation("meo: delta must lie in (0, 1)");
  }
  ++counters.meo_calls;

  const Manifold& m = *g.base.manifold;
  const long long growth_cap = meo_budget(config, m.intrinsic_dim()) - 1;
  const double threshold = -0.5 * config.eps_h;

  // random unit start; a zero "gradient" is fine here, the start is what matters
  Tangent zero = make_tangent(g.base, Vec::Zero(g.coords.size()));
  KrylovState state = KrylovState::init_basis(zero, /*perturb=*/true,
                                              /*rel_magnitude=*/1.0,
                                              /*eps_g_floor=*/1.0, rng);

  double lambda_best = std::numeric_limits<double>::infinity();
  for (long long j = 1; j <= growth_cap; ++j) {
    if (!state.extend(hess_vec)) break;
    int order = state.order();
    Vec diag = state.diag_head(order);
    Vec off = state.off_head(order);
    double lam = tridiag::min_eigenvalue(diag, off);
    lambda_best = std::min(lambda_best, lam);
    if (lam <= threshold) {
      Vec y = tridiag::eigenvector(diag, off, lam);
      Tangent v = state.lift(y);
      double vn = v.norm();
      if (vn <= 0.0) continue;
      v.coords /= vn;
      // direct verification of the returned pair
      double rayleigh = v.coords.dot(hess_vec(v.coords));
      if (rayleigh > threshold) continue;  // Ritz pair not converged yet
      if (v.coords.dot(g.coords) > 0.0) v.coords = -v.coords;
      if (v.coords.dot(g.coords) > 0.0 || rayleigh > threshold) {
        throw InvariantViolation("meo: emitted direction violates its contract");
      }
      return MeoNegativeCurvature{std::move(v), rayleigh};
    }
    if (state.invariant_subspace()) break;
  }
  if (!std::isfinite(lambda_best)) lambda_best = 0.0;
  return MeoCertified{lambda_best};
}

bool meo_certified(const MeoOutcome& outcome) {
  return std::holds_alternative<MeoCertified>(outcome);
}

double meo_lambda_estimate(const MeoOutcome& outcome) {
  if (const auto* c = std::get_if<MeoCertified>(&outcome)) return c->lambda_est;
  return std::get<MeoNegativeCurvature>(outcome).rayleigh;
}

}  // namespace rarn
