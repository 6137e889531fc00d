#ifndef RARN_TRIDIAG_HPP
#define RARN_TRIDIAG_HPP

#include "rarn/types.hpp"

namespace rarn::tridiag {

// Symmetric tridiagonal matrices are passed as (diag, off) with
// diag.size() == m and off.size() == m - 1. All routines are pure.

/// Number of eigenvalues of T strictly below x (Sturm count via the
/// shifted LDL^T pivot recurrence).
int count_below(const Vec& diag, const Vec& off, double x);

/// Smallest eigenvalue by bisection on the Sturm count, resolved to
/// an absolute tolerance of 1e-12 relative to the Gershgorin scale.
double min_eigenvalue(const Vec& diag, const Vec& off);

/// Unit eigenvector for an eigenvalue estimate (inverse iteration).
Vec eigenvector(const Vec& diag, const Vec& off, double lambda);

/// Solves (T + shift I) x = rhs via LDL^T. Returns false when the shifted
/// matrix is not (numerically) positive definite.
bool shifted_solve(const Vec& diag, const Vec& off, double shift,
                   const Vec& rhs, Vec& x);

Mat to_dense(const Vec& diag, const Vec& off);

}  // namespace rarn::tridiag

#endif  // RARN_TRIDIAG_HPP
