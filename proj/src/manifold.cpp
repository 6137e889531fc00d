#include "rarn/manifold.hpp"

#include <cmath>
#include <sstream>

namespace rarn {

namespace {

constexpr double kSphereNormTol = 1e-12;
constexpr double kAntipodalTol = 1e-12;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

void require_same_space(const Manifold* a, const Manifold* b) {
  require(a != nullptr && a == b, "operands live on different manifolds");
}

}  // namespace

Vec Manifold::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss;
  Vec x(ambient_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
  return project_point(x);
}

Vec Manifold::random_unit_tangent(const Vec& x, std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec v(ambient_dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    v = project_tangent(x, v);
    double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
  }
  throw InvariantViolation("failed to draw a random unit tangent");
}

// ---------------------------------------------------------------------------
// EuclideanSpace

void EuclideanSpace::check_point(const Vec& x) const {
  require(x.size() == n_, "euclidean point has wrong dimension");
  require(x.allFinite(), "euclidean point has non-finite coordinates");
}

Vec EuclideanSpace::retract(const Vec& x, const Vec& eta, RetractionKind) const {
  return x + eta;
}

Vec EuclideanSpace::log(const Vec& x, const Vec& y) const { return y - x; }

Vec EuclideanSpace::transport(const Vec&, const Vec&, const Vec& v) const {
  return v;
}

double EuclideanSpace::distance(const Vec& x, const Vec& y) const {
  return (x - y).norm();
}

// ---------------------------------------------------------------------------
// Sphere

void Sphere::check_point(const Vec& x) const {
  require(x.size() == n_, "sphere point has wrong dimension");
  require(x.allFinite(), "sphere point has non-finite coordinates");
  if (std::abs(x.norm() - 1.0) > kSphereNormTol) {
    std::ostringstream os;
    os << "sphere point norm deviates from 1 by " << std::abs(x.norm() - 1.0);
    throw ContractViolation(os.str());
  }
}

Vec Sphere::project_point(const Vec& x) const {
  double nrm = x.norm();
  require(nrm > 0.0, "cannot project the origin onto the sphere");
  return x / nrm;
}

Vec Sphere::project_tangent(const Vec& x, const Vec& v) const {
  return v - x.dot(v) * x;
}

Vec Sphere::retract(const Vec& x, const Vec& eta, RetractionKind kind) const {
  if (kind == RetractionKind::Projection) {
    return project_point(x + eta);
  }
  double theta = eta.norm();
  if (theta < 1e-300) return x;
  // exp_x(eta) = cos(t) x + sin(t) eta / t, re-normalized against drift
  Vec y = std::cos(theta) * x + (std::sin(theta) / theta) * eta;
  return project_point(y);
}

Vec Sphere::log(const Vec& x, const Vec& y) const {
  double c = x.dot(y);
  Vec v = y - c * x;
  double s = v.norm();
  double theta = std::atan2(s, c);
  if (s < 1e-14) {
    if (c > 0.0) return Vec::Zero(n_);
    throw ContractViolation("log undefined for antipodal sphere points");
  }
  require(c > -1.0 + kAntipodalTol, "log undefined for antipodal sphere points");
  return (theta / s) * v;
}

Vec Sphere::transport(const Vec& x, const Vec& y, const Vec& v) const {
  Vec u = log(x, y);
  double theta = u.norm();
  if (theta < 1e-14) return v;
  Vec e = u / theta;
  double c = e.dot(v);
  // component along the geodesic direction rotates in the {x, e} plane;
  // the orthogonal complement is carried unchanged
  return v + c * ((std::cos(theta) - 1.0) * e - std::sin(theta) * x);
}

double Sphere::distance(const Vec& x, const Vec& y) const {
  double c = x.dot(y);
  double s = (y - c * x).norm();
  return std::atan2(s, c);
}

// ---------------------------------------------------------------------------
// Point / Tangent wrappers

Point make_point(const Manifold& m, Vec coords) {
  m.check_point(coords);
  return Point{std::move(coords), &m};
}

Tangent make_tangent(const Point& base, Vec coords) {
  require(base.manifold != nullptr, "tangent base has no manifold");
  require(coords.size() == base.coords.size(), "tangent has wrong dimension");
  return Tangent{std::move(coords), base};
}

double inner(const Tangent& u, const Tangent& v) {
  require_same_space(u.base.manifold, v.base.manifold);
  double scale = std::max(1.0, u.base.coords.norm());
  require((u.base.coords - v.base.coords).norm() <= 1e-12 * scale,
          "inner product requires tangents at the same base point");
  return u.coords.dot(v.coords);
}

Point retract(const Point& x, const Tangent& eta, RetractionKind kind) {
  require_same_space(x.manifold, eta.base.manifold);
  return Point{x.manifold->retract(x.coords, eta.coords, kind), x.manifold};
}

Tangent log_map(const Point& x, const Point& y) {
  require_same_space(x.manifold, y.manifold);
  return Tangent{x.manifold->log(x.coords, y.coords), x};
}

Tangent transport(const Point& x, const Point& y, const Tangent& v) {
  require_same_space(x.manifold, y.manifold);
  require_same_space(x.manifold, v.base.manifold);
  return Tangent{x.manifold->transport(x.coords, y.coords, v.coords), y};
}

double distance(const Point& x, const Point& y) {
  require_same_space(x.manifold, y.manifold);
  return x.manifold->distance(x.coords, y.coords);
}

}  // namespace rarn
