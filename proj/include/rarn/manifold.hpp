#ifndef RARN_MANIFOLD_HPP
#define RARN_MANIFOLD_HPP

#include "rarn/types.hpp"

#include <memory>
#include <random>
#include <string>

namespace rarn {

enum class RetractionKind { Exponential, Projection };

/// Geometry of an embedded Riemannian manifold with the induced metric.
/// All operations are pure; implementations must be safe for concurrent
/// read-only use.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index ambient_dim() const = 0;
  virtual Eigen::Index intrinsic_dim() const = 0;

  /// Throws ContractViolation if x violates the point invariants.
  virtual void check_point(const Vec& x) const = 0;

  virtual Vec project_point(const Vec& x) const = 0;
  virtual Vec project_tangent(const Vec& x, const Vec& v) const = 0;

  virtual Vec retract(const Vec& x, const Vec& eta, RetractionKind kind) const = 0;

  /// Inverse of the exponential map. Throws ContractViolation where
  /// undefined (antipodal points on the sphere).
  virtual Vec log(const Vec& x, const Vec& y) const = 0;

  /// Parallel transport of v from T_x to T_y along the connecting geodesic.
  virtual Vec transport(const Vec& x, const Vec& y, const Vec& v) const = 0;

  virtual double distance(const Vec& x, const Vec& y) const = 0;

  Vec random_point(std::mt19937_64& rng) const;
  Vec random_unit_tangent(const Vec& x, std::mt19937_64& rng) const;
};

/// Flat space R^n. Both retraction kinds coincide with x + eta; transport is
/// the identity.
class EuclideanSpace final : public Manifold {
 public:
  explicit EuclideanSpace(Eigen::Index n) : n_(n) {}

  std::string name() const override { return "euclidean"; }
  Eigen::Index ambient_dim() const override { return n_; }
  Eigen::Index intrinsic_dim() const override { return n_; }

  void check_point(const Vec& x) const override;
  Vec project_point(const Vec& x) const override { return x; }
  Vec project_tangent(const Vec&, const Vec& v) const override { return v; }
  Vec retract(const Vec& x, const Vec& eta, RetractionKind kind) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance(const Vec& x, const Vec& y) const override;

 private:
  Eigen::Index n_;
};

/// Unit sphere S^{n-1} embedded in R^n with the induced metric. Closed-form
/// exponential map, logarithm, and geodesic parallel transport. Points are
/// re-normalized after every retraction to stop drift.
class Sphere final : public Manifold {
 public:
  explicit Sphere(Eigen::Index ambient_n) : n_(ambient_n) {}

  std::string name() const override { return "sphere"; }
  Eigen::Index ambient_dim() const override { return n_; }
  Eigen::Index intrinsic_dim() const override { return n_ - 1; }

  void check_point(const Vec& x) const override;
  Vec project_point(const Vec& x) const override;
  Vec project_tangent(const Vec& x, const Vec& v) const override;
  Vec retract(const Vec& x, const Vec& eta, RetractionKind kind) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance(const Vec& x, const Vec& y) const override;

 private:
  Eigen::Index n_;
};

/// A manifold element in embedding coordinates.
struct Point {
  Vec coords;
  const Manifold* manifold = nullptr;
};

/// A tangent vector in embedding coordinates, attached to its base point.
struct Tangent {
  Vec coords;
  Point base;

  double norm() const { return coords.norm(); }
};

Point make_point(const Manifold& m, Vec coords);
Tangent make_tangent(const Point& base, Vec coords);

/// Riemannian inner product; requires both vectors to share the base point.
double inner(const Tangent& u, const Tangent& v);

Point retract(const Point& x, const Tangent& eta, RetractionKind kind);
Tangent log_map(const Point& x, const Point& y);
Tangent transport(const Point& x, const Point& y, const Tangent& v);
double distance(const Point& x, const Point& y);

}  // namespace rarn

#endif  // RARN_MANIFOLD_HPP
