// Reference implementations used only by tests: dense eigendecomposition
// based subproblem solvers, a brute-force one-dimensional minimizer, and a
// Runge-Kutta integrator for the parallel transport equation on the sphere.
// Deliberately independent of the library's tridiagonal/Lanczos path.

#ifndef RARN_TEST_ORACLES_HPP
#define RARN_TEST_ORACLES_HPP

#include "rarn/types.hpp"

#include <functional>

namespace rarn::oracles {

struct DenseSolution {
  Vec eta;
  double lambda = 0.0;
  double model_value = 0.0;  // <g,eta> + eta'H eta/2 + regularizer
  bool hard_case = false;
};

/// Global minimizer of <g,eta> + eta'H eta/2 + sigma/(2+omega) |eta|^{2+omega}
/// via a full eigendecomposition and scalar bisection on the secular
/// equation in the eigenbasis.
DenseSolution dense_power_reg_min(const Mat& H, const Vec& g, double sigma,
                                  double omega);

/// Trust-region minimizer of <g,eta> + eta'H eta/2 over |eta| <= radius by
/// the same spectral route.
DenseSolution dense_trust_region_min(const Mat& H, const Vec& g, double radius);

/// Minimum of a unimodal scalar function on [0, hi] by golden-section search.
double golden_section_min(const std::function<double(double)>& f, double hi,
                          double tol = 1e-12);

/// Endpoint of the parallel transport of v along the unit-sphere geodesic
/// from x to y, integrated with RK4 on V' = -<V, gamma'> gamma.
Vec transport_by_ode(const Vec& x, const Vec& y, const Vec& v, int steps = 2000);

/// Dense symmetric matrix with a prescribed spectrum under a random
/// orthogonal conjugation.
Mat random_symmetric_with_spectrum(const Vec& spectrum, std::uint64_t seed);

}  // namespace rarn::oracles

#endif  // RARN_TEST_ORACLES_HPP
