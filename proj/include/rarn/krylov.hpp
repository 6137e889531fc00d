#ifndef RARN_KRYLOV_HPP
#define RARN_KRYLOV_HPP

#include "rarn/manifold.hpp"
#include "rarn/types.hpp"

#include <random>
#include <vector>

namespace rarn {

/// Lanczos tridiagonalization state over a tangent space: orthonormal basis
/// q_0..q_m, tridiagonal coefficients of the projected operator, and the
/// projections of the gradient onto the basis. Single-run mutable state;
/// not shared across threads.
class KrylovState {
 public:
  /// Starts the basis from g, or from g + zeta * u with u a random unit
  /// tangent and zeta = rel_magnitude * max(||g||, eps_g_floor) when
  /// perturb is set. Throws when g = 0 and no perturbation is requested.
  static KrylovState init_basis(const Tangent& g, bool perturb,
                                double rel_magnitude, double eps_g_floor,
                                std::mt19937_64& rng);

  /// Appends the next Lanczos vector via the three-term recurrence with full
  /// reorthogonalization, consuming exactly one Hessian-vector product (a
  /// no-op returning false once the subspace has become invariant).
  /// Advances the solvable order by one.
  bool extend(const HessVecFn& hess_vec);

  /// Solvable order j: T_j and the reduced gradient are available.
  int order() const { return static_cast<int>(diag_.size()); }

  bool invariant_subspace() const { return breakdown_; }
  bool perturbed() const { return perturbed_; }
  double g_norm() const { return g_norm_; }
  const Point& base() const { return base_; }

  /// Tridiagonal of order j (diag size j, off size j-1).
  Vec diag_head(int j) const;
  Vec off_head(int j) const;

  /// First j projections <q_i, g>.
  Vec reduced_gradient(int j) const;

  /// Off-diagonal coupling to the next basis vector past order j, and that
  /// vector itself; beta is 0 at an invariant subspace.
  double lookahead_beta(int j) const;
  const Vec& lookahead_vec(int j) const;

  /// Sum u_i q_i as a tangent at the base point; preserves the norm.
  Tangent lift(const Vec& u) const;

  /// g minus its projection onto the first j basis vectors (ambient coords).
  Vec gradient_outside_span(int j) const;

  /// Worst pairwise orthogonality deviation observed across all extends.
  double max_ortho_error() const { return ortho_error_; }

  const std::vector<Vec>& basis() const { return basis_; }

 private:
  KrylovState() = default;

  Point base_;
  Vec g_ambient_;
  double g_norm_ = 0.0;
  bool perturbed_ = false;
  bool breakdown_ = false;
  double ortho_error_ = 0.0;
  std::vector<Vec> basis_;
  std::vector<double> diag_;
  std::vector<double> off_;
  std::vector<double> gtilde_;
};

/// Solution of a reduced (tridiagonal) model problem in R^j.
struct ReducedSolution {
  Vec u;
  double lambda = 0.0;
  bool on_boundary = false;
  bool hard_case = false;
};

/// Global minimizer of <gt, u> + u^T T u / 2 + sigma/(2+omega) ||u||^{2+omega}
/// via the secular equation lambda = sigma ||u(lambda)||^omega with
/// u(lambda) = -(T + lambda I)^{-1} gt, safeguarded Newton/bisection to
/// 1e-12 relative; hard case resolved by eigenvector completion.
ReducedSolution solve_reduced_ar(const Vec& diag, const Vec& off, const Vec& gt,
                                 double sigma, double omega);

/// Trust-region solution of <gt, u> + u^T T u / 2 subject to ||u|| <= radius:
/// interior Newton point when T is positive definite and the unconstrained
/// solution fits, otherwise the boundary multiplier via a More-Sorensen
/// style safeguarded root-find to 1e-10; hard case resolved by eigenvector
/// completion to the boundary.
ReducedSolution solve_reduced_tr(const Vec& diag, const Vec& off, const Vec& gt,
                                 double radius);

/// T u for a symmetric tridiagonal T.
Vec tridiag_apply(const Vec& diag, const Vec& off, const Vec& u);

}  // namespace rarn

#endif  // RARN_KRYLOV_HPP
