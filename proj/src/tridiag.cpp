#include "rarn/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rarn::tridiag {

namespace {

double gershgorin_radius(const Vec& diag, const Vec& off) {
  const Eigen::Index m = diag.size();
  double r = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < m) row += std::abs(off[i]);
    r = std::max(r, row);
  }
  return r;
}

}  // namespace

int count_below(const Vec& diag, const Vec& off, double x) {
  const Eigen::Index m = diag.size();
  int count = 0;
  double d = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double e2 = (i > 0) ? off[i - 1] * off[i - 1] : 0.0;
    d = diag[i] - x - (i > 0 ? e2 / d : 0.0);
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
  }
  return count;
}

double min_eigenvalue(const Vec& diag, const Vec& off) {
  if (diag.size() == 0) throw ContractViolation("empty tridiagonal matrix");
  if (diag.size() == 1) return diag[0];
  double r = gershgorin_radius(diag, off);
  double lo = -r - 1.0, hi = r + 1.0;
  const double tol = 1e-12 * std::max(1.0, r);
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (count_below(diag, off, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool shifted_solve(const Vec& diag, const Vec& off, double shift,
                   const Vec& rhs, Vec& x) {
  const Eigen::Index m = diag.size();
  Vec d(m), l(std::max<Eigen::Index>(m - 1, 0));
  double scale = std::max(1.0, gershgorin_radius(diag, off) + std::abs(shift));
  for (Eigen::Index i = 0; i < m; ++i) {
    double di = diag[i] + shift;
    if (i > 0) di -= l[i - 1] * l[i - 1] * d[i - 1];
    if (di <= scale * 1e-300) return false;
    d[i] = di;
    if (i + 1 < m) l[i] = off[i] / di;
  }
  x = rhs;
  for (Eigen::Index i = 1; i < m; ++i) x[i] -= l[i - 1] * x[i - 1];
  for (Eigen::Index i = 0; i < m; ++i) x[i] /= d[i];
  for (Eigen::Index i = m - 2; i >= 0; --i) x[i] -= l[i] * x[i + 1];
  return true;
}

Vec eigenvector(const Vec& diag, const Vec& off, double lambda) {
  const Eigen::Index m = diag.size();
  if (m == 1) return Vec::Ones(1);
  double scale = std::max(1.0, gershgorin_radius(diag, off));
  Vec v = Vec::Ones(m) / std::sqrt(static_cast<double>(m));
  // inverse iteration on T - lambda I, nudging the shift until the
  // factorization goes through
  for (int pass = 0; pass < 60; ++pass) {
    double nudge = scale * 1e-14 * static_cast<double>(1LL << std::min(pass, 40));
    Vec w;
    bool ok = shifted_solve(diag, off, -(lambda - nudge), v, w);
    if (!ok) {
      // shift sits on the wrong side; try from above
      ok = shifted_solve(diag, off, -(lambda + nudge), v, w);
      if (!ok) continue;
    }
    double nrm = w.norm();
    if (!std::isfinite(nrm) || nrm == 0.0) continue;
    v = w / nrm;
    // two refinement sweeps are ample for well-separated Ritz values
    if (pass >= 1) break;
  }
  return v;
}

Mat to_dense(const Vec& diag, const Vec& off) {
  const Eigen::Index m = diag.size();
  Mat T = Mat::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    T(i, i) = diag[i];
    if (i + 1 < m) {
      T(i, i + 1) = off[i];
      T(i + 1, i) = off[i];
    }
  }
  return T;
}

}  // namespace rarn::tridiag
