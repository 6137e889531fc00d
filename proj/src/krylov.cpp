#include "rarn/krylov.hpp"

#include "rarn/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rarn {

// ---------------------------------------------------------------------------
// KrylovState

KrylovState KrylovState::init_basis(const Tangent& g, bool perturb,
                                    double rel_magnitude, double eps_g_floor,
                                    std::mt19937_64& rng) {
  if (g.base.manifold == nullptr) {
    throw ContractViolation("krylov: tangent without a manifold");
  }
  KrylovState s;
  s.base_ = g.base;
  s.g_ambient_ = g.coords;
  s.g_norm_ = g.coords.norm();
  s.perturbed_ = perturb;

  Vec start = g.coords;
  if (perturb) {
    const Manifold& m = *g.base.manifold;
    double zeta = rel_magnitude * std::max(s.g_norm_, eps_g_floor);
    for (int attempt = 0; attempt < 16; ++attempt) {
      Vec u = m.random_unit_tangent(g.base.coords, rng);
      Vec candidate = g.coords + zeta * u;
      if (candidate.norm() > 1e-14 * std::max(1.0, s.g_norm_)) {
        start = candidate;
        break;
      }
    }
  } else if (s.g_norm_ == 0.0) {
    throw ContractViolation("krylov: zero gradient start requires perturbation");
  }

  double nrm = start.norm();
  if (nrm == 0.0) throw ContractViolation("krylov: degenerate start vector");
  s.basis_.push_back(start / nrm);
  s.gtilde_.push_back(s.basis_.front().dot(g.coords));
  return s;
}

bool KrylovState::extend(const HessVecFn& hess_vec) {
  if (breakdown_ && basis_.size() == diag_.size()) return false;

  const Vec& q = basis_.back();
  Vec w = hess_vec(q);
  if (base_.manifold != nullptr) {
    // roundoff can leak a normal component on curved manifolds
    w = base_.manifold->project_tangent(base_.coords, w);
  }

  double d = q.dot(w);
  diag_.push_back(d);

  w -= d * q;
  if (basis_.size() >= 2) w -= off_.back() * basis_[basis_.size() - 2];

  // full reorthogonalization, two sweeps
  double tscale = 0.0;
  for (double v : diag_) tscale = std::max(tscale, std::abs(v));
  for (double v : off_) tscale = std::max(tscale, std::abs(v));
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (const Vec& qi : basis_) w -= qi.dot(w) * qi;
  }

  double e = w.norm();
  double tol = 1e-12 * std::max({g_norm_, tscale, 1e-30});
  if (e <= tol ||
      static_cast<Eigen::Index>(basis_.size()) >=
          base_.manifold->intrinsic_dim()) {
    breakdown_ = true;
    return true;
  }

  Vec q_next = w / e;
  double worst = 0.0;
  for (const Vec& qi : basis_) worst = std::max(worst, std::abs(qi.dot(q_next)));
  ortho_error_ = std::max(ortho_error_, worst);

  off_.push_back(e);
  basis_.push_back(std::move(q_next));
  gtilde_.push_back(basis_.back().dot(g_ambient_));
  return true;
}

Vec KrylovState::diag_head(int j) const {
  if (j < 1 || j > order()) throw ContractViolation("krylov: bad order");
  return Eigen::Map<const Vec>(diag_.data(), j);
}

Vec KrylovState::off_head(int j) const {
  if (j < 1 || j > order()) throw ContractViolation("krylov: bad order");
  return Eigen::Map<const Vec>(off_.data(), j - 1);
}

Vec KrylovState::reduced_gradient(int j) const {
  if (j < 1 || j > order()) throw ContractViolation("krylov: bad order");
  return Eigen::Map<const Vec>(gtilde_.data(), j);
}

double KrylovState::lookahead_beta(int j) const {
  if (j == order() && breakdown_) return 0.0;
  if (j > static_cast<int>(off_.size())) throw ContractViolation("krylov: bad order");
  return off_[j - 1];
}

const Vec& KrylovState::lookahead_vec(int j) const {
  if (j >= static_cast<int>(basis_.size())) {
    throw ContractViolation("krylov: no lookahead vector past an invariant subspace");
  }
  return basis_[j];
}

Tangent KrylovState::lift(const Vec& u) const {
  if (u.size() > static_cast<Eigen::Index>(basis_.size())) {
    throw ContractViolation("krylov: lift dimension exceeds basis size");
  }
  Vec out = Vec::Zero(base_.coords.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out += u[i] * basis_[i];
  return Tangent{std::move(out), base_};
}

Vec KrylovState::gradient_outside_span(int j) const {
  Vec r = g_ambient_;
  for (int i = 0; i < j; ++i) r -= gtilde_[i] * basis_[i];
  return r;
}

// ---------------------------------------------------------------------------
// Reduced solvers

namespace {

struct ShiftedSolveResult {
  bool pd = false;
  Vec u;
  double u_norm = 0.0;
};

ShiftedSolveResult eval_step(const Vec& diag, const Vec& off, const Vec& gt,
                             double lambda) {
  ShiftedSolveResult r;
  Vec rhs = -gt;
  r.pd = tridiag::shifted_solve(diag, off, lambda, rhs, r.u);
  if (r.pd) r.u_norm = r.u.norm();
  return r;
}

void require_finite(const Vec& diag, const Vec& off, const Vec& gt) {
  if (!diag.allFinite() || !off.allFinite() || !gt.allFinite()) {
    throw ContractViolation("reduced solve: non-finite inputs");
  }
}

double matrix_scale(const Vec& diag, const Vec& off) {
  double s = 1.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) s = std::max(s, std::abs(diag[i]));
  for (Eigen::Index i = 0; i < off.size(); ++i) s = std::max(s, std::abs(off[i]));
  return s;
}

/// Completion u_perp + t v reaching the target norm; both signs of t give the
/// same model value in the hard case, so t >= 0 is fixed for determinism.
bool complete_with_eigvec(const Vec& u_near, const Vec& v, double target_norm,
                          Vec& out) {
  Vec u_perp = u_near - v.dot(u_near) * v;
  double rem = target_norm * target_norm - u_perp.squaredNorm();
  if (rem < 0.0) return false;
  out = u_perp + std::sqrt(rem) * v;
  return true;
}

}  // namespace

ReducedSolution solve_reduced_ar(const Vec& diag, const Vec& off, const Vec& gt,
                                 double sigma, double omega) {
  require_finite(diag, off, gt);
  if (!(sigma > 0.0) || !(omega > 0.0) || omega > 1.0) {
    throw ContractViolation("reduced ar solve: need sigma > 0 and omega in (0, 1]");
  }
  const Eigen::Index m = diag.size();
  const double lam_min = tridiag::min_eigenvalue(diag, off);
  const double lam_floor = std::max(0.0, -lam_min);
  const double scale = matrix_scale(diag, off);

  ReducedSolution sol;
  if (gt.norm() == 0.0 && lam_min >= 0.0) {
    sol.u = Vec::Zero(m);
    sol.lambda = 0.0;
    return sol;
  }

  auto secular = [&](double lambda, ShiftedSolveResult& r) {
    r = eval_step(diag, off, gt, lambda);
    if (!r.pd) return -std::numeric_limits<double>::infinity();
    return lambda - sigma * std::pow(r.u_norm, omega);
  };

  // bracket: psi < 0 at the floor side, psi > 0 at hi
  double lo = lam_floor;
  double hi = std::max({1.0, 2.0 * lam_floor, scale});
  ShiftedSolveResult r_hi;
  for (int grow = 0; grow < 400 && secular(hi, r_hi) <= 0.0; ++grow) hi *= 2.0;

  // probe just above the floor to discriminate the hard case
  // stays clear of the eigenvalue bisection tolerance (1e-12 * scale)
  const double probe_off = std::max(1e-12, 1e-10 * std::max(lam_floor, scale));
  ShiftedSolveResult r_probe;
  double psi_probe = secular(lam_floor + probe_off, r_probe);
  if (lam_min > 0.0) {
    // T positive definite: lambda may reach 0 exactly
    ShiftedSolveResult r0;
    double psi0 = secular(0.0, r0);
    if (r0.pd && psi0 >= 0.0) {
      // regularizer multiplier is numerically zero at the Newton point
      sol.u = r0.u;
      sol.lambda = sigma * std::pow(r0.u_norm, omega);
      return sol;
    }
    lo = 0.0;
  } else if (r_probe.pd && psi_probe >= 0.0) {
    // hard case: the secular equation has no root above the floor
    Vec v = tridiag::eigenvector(diag, off, lam_min);
    double target = std::pow(lam_floor / sigma, 1.0 / omega);
    Vec completed;
    if (complete_with_eigvec(r_probe.u, v, target, completed)) {
      sol.u = completed;
      sol.lambda = lam_floor;
      sol.hard_case = true;
      return sol;
    }
    // completion impossible: the root sits inside the probe offset
  } else {
    lo = lam_floor + ((r_probe.pd && psi_probe < 0.0) ? probe_off : 0.0);
  }

  // safeguarded Newton on psi(lambda) = lambda - sigma ||u(lambda)||^omega
  double lambda = 0.5 * (lo + hi);
  ShiftedSolveResult cur;
  for (int it = 0; it < 200; ++it) {
    double psi = secular(lambda, cur);
    if (!cur.pd || psi < 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (cur.pd && std::abs(psi) <= 1e-12 * (1.0 + lambda)) break;
    double next = 0.5 * (lo + hi);
    if (cur.pd && cur.u_norm > 0.0) {
      Vec w;
      if (tridiag::shifted_solve(diag, off, lambda, cur.u, w)) {
        double dnorm = -cur.u.dot(w) / cur.u_norm;  // d||u||/dlambda
        double dpsi = 1.0 - sigma * omega * std::pow(cur.u_norm, omega - 1.0) * dnorm;
        double candidate = lambda - psi / dpsi;
        if (candidate > lo && candidate < hi) next = candidate;
      }
    }
    if (std::abs(next - lambda) <= 1e-15 * (1.0 + lambda)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  ShiftedSolveResult fin = eval_step(diag, off, gt, lambda);
  if (!fin.pd) {
    // collapsed onto the floor: treat as hard case
    Vec v = tridiag::eigenvector(diag, off, lam_min);
    double target = std::pow(lam_floor / sigma, 1.0 / omega);
    ShiftedSolveResult near = eval_step(diag, off, gt, lam_floor + probe_off);
    Vec completed;
    if (near.pd && complete_with_eigvec(near.u, v, target, completed)) {
      sol.u = completed;
      sol.lambda = lam_floor;
      sol.hard_case = true;
      return sol;
    }
    throw InvariantViolation("reduced ar solve failed to converge");
  }
  sol.u = fin.u;
  sol.lambda = lambda;
  double residual = std::abs(lambda - sigma * std::pow(fin.u_norm, omega));
  if (residual > 1e-10 * (1.0 + lambda)) {
    throw InvariantViolation("reduced ar solve: secular residual out of tolerance");
  }
  return sol;
}

ReducedSolution solve_reduced_tr(const Vec& diag, const Vec& off, const Vec& gt,
                                 double radius) {
  require_finite(diag, off, gt);
  if (!(radius > 0.0)) throw ContractViolation("reduced tr solve: radius must be positive");
  const Eigen::Index m = diag.size();
  const double lam_min = tridiag::min_eigenvalue(diag, off);
  const double lam_floor = std::max(0.0, -lam_min);
  const double scale = matrix_scale(diag, off);
  const double boundary_tol = 1e-10 * radius;

  ReducedSolution sol;
  if (gt.norm() == 0.0 && lam_min >= 0.0) {
    sol.u = Vec::Zero(m);
    return sol;
  }

  if (lam_min > 0.0) {
    ShiftedSolveResult r0 = eval_step(diag, off, gt, 0.0);
    if (r0.pd && r0.u_norm <= radius) {
      sol.u = r0.u;
      sol.lambda = 0.0;
      sol.on_boundary = r0.u_norm >= radius * (1.0 - 1e-12);
      return sol;
    }
  }

  // boundary case: find lambda >= lam_floor with ||u(lambda)|| = radius
  // stays clear of the eigenvalue bisection tolerance (1e-12 * scale)
  const double probe_off = std::max(1e-12, 1e-10 * std::max(lam_floor, scale));
  ShiftedSolveResult r_probe = eval_step(diag, off, gt, lam_floor + probe_off);
  if (lam_min <= 0.0 && r_probe.pd && r_probe.u_norm < radius) {
    // hard case: even at the floor multiplier the step falls short
    Vec v = tridiag::eigenvector(diag, off, lam_min);
    Vec completed;
    if (complete_with_eigvec(r_probe.u, v, radius, completed)) {
      sol.u = completed;
      sol.lambda = lam_floor;
      sol.on_boundary = true;
      sol.hard_case = true;
      return sol;
    }
  }

  double lo = lam_floor;
  double hi = std::max({1.0, 2.0 * lam_floor, scale});
  for (int grow = 0; grow < 400; ++grow) {
    ShiftedSolveResult r = eval_step(diag, off, gt, hi);
    if (r.pd && r.u_norm < radius) break;
    hi *= 2.0;
  }

  double lambda = 0.5 * (lo + hi);
  ShiftedSolveResult cur;
  for (int it = 0; it < 200; ++it) {
    cur = eval_step(diag, off, gt, lambda);
    bool below = !cur.pd || cur.u_norm > radius;  // lambda too small
    if (below) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (cur.pd && std::abs(cur.u_norm - radius) <= boundary_tol) break;
    double next = 0.5 * (lo + hi);
    if (cur.pd && cur.u_norm > 0.0) {
      Vec w;
      if (tridiag::shifted_solve(diag, off, lambda, cur.u, w)) {
        // Newton step on 1/||u|| - 1/radius
        double phi = 1.0 / cur.u_norm - 1.0 / radius;
        double dphi = cur.u.dot(w) / std::pow(cur.u_norm, 3.0);
        double candidate = lambda - phi / dphi;
        if (candidate > lo && candidate < hi) next = candidate;
      }
    }
    if (std::abs(next - lambda) <= 1e-15 * (1.0 + lambda)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  cur = eval_step(diag, off, gt, lambda);
  if (!cur.pd || std::abs(cur.u_norm - radius) > 1e-8 * radius) {
    // collapsed onto the floor: eigenvector completion to the boundary
    Vec v = tridiag::eigenvector(diag, off, lam_min);
    ShiftedSolveResult near = eval_step(diag, off, gt, lam_floor + probe_off);
    Vec completed;
    if (near.pd && near.u_norm <= radius &&
        complete_with_eigvec(near.u, v, radius, completed)) {
      sol.u = completed;
      sol.lambda = lam_floor;
      sol.on_boundary = true;
      sol.hard_case = true;
      return sol;
    }
    throw InvariantViolation("reduced tr solve failed to converge");
  }
  sol.u = cur.u;
  sol.lambda = std::max(lambda, 0.0);
  sol.on_boundary = true;
  return sol;
}

Vec tridiag_apply(const Vec& diag, const Vec& off, const Vec& u) {
  const Eigen::Index m = diag.size();
  Vec out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = diag[i] * u[i];
    if (i > 0) v += off[i - 1] * u[i - 1];
    if (i + 1 < m) v += off[i] * u[i + 1];
    out[i] = v;
  }
  return out;
}

}  // namespace rarn
