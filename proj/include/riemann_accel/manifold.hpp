#pragma once

#include "riemann_accel/errors.hpp"

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

namespace riemann_accel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class ManifoldKind { Euclidean, Sphere, Spd, Hyperboloid };

std::string to_string(ManifoldKind kind);

/// A point on a manifold in ambient coordinates. Vector-valued manifolds
/// store a single column; SPD(d) stores the full d x d matrix.
struct Point {
  ManifoldKind kind = ManifoldKind::Euclidean;
  Matrix coords;
};

/// A tangent vector attached to its base point. Arithmetic is only defined
/// between vectors sharing a base.
struct TangentVector {
  Point base;
  Matrix coords;
};

bool same_base(const TangentVector& u, const TangentVector& v);

TangentVector operator+(const TangentVector& u, const TangentVector& v);
TangentVector operator-(const TangentVector& u, const TangentVector& v);
TangentVector operator-(const TangentVector& v);
TangentVector operator*(double a, const TangentVector& v);

/// log/transport requested across the cut locus (antipodal sphere points).
class CutLocusError : public std::runtime_error {
 public:
  CutLocusError(const std::string& what, Point from, Point to)
      : std::runtime_error(what), from_(std::move(from)), to_(std::move(to)) {}
  const Point& from() const { return from_; }
  const Point& to() const { return to_; }

 private:
  Point from_;
  Point to_;
};

/// Geometric operations of a Riemannian manifold. Implementations are
/// stateless apart from their dimension, so a single instance can be shared
/// between threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  /// Intrinsic dimension.
  virtual int dimension() const = 0;
  /// Shape of the ambient coordinate matrix.
  virtual int ambient_rows() const = 0;
  virtual int ambient_cols() const { return 1; }

  virtual double inner(const TangentVector& u, const TangentVector& v) const = 0;
  double norm(const TangentVector& v) const;

  virtual Point exp(const TangentVector& v) const = 0;
  virtual TangentVector log(const Point& x, const Point& y) const = 0;
  virtual TangentVector transport(const Point& x, const Point& y,
                                  const TangentVector& v) const = 0;
  virtual double distance(const Point& x, const Point& y) const = 0;
  virtual TangentVector project_tangent(const Point& x, const Matrix& w) const = 0;

  /// Pulls slightly-off coordinates back onto the manifold.
  virtual Point retract_to_manifold(const Matrix& coords) const = 0;

  /// Sectional curvature bounds of the whole manifold.
  virtual double curvature_min() const = 0;
  virtual double curvature_max() const = 0;
  /// Radius of the ball in each tangent space on which exp is invertible.
  virtual double injectivity_radius() const {
    return std::numeric_limits<double>::infinity();
  }
  /// True when exp(v) travels past the injectivity radius. exp still
  /// succeeds; callers record it as a diagnostic.
  bool exceeds_injectivity(const TangentVector& v) const {
    return norm(v) >= injectivity_radius();
  }

  /// Returns an empty string when x is a valid point, otherwise the reason.
  virtual std::string check_point(const Point& x) const = 0;
  virtual std::string check_tangent(const TangentVector& v) const = 0;

  /// A reference point (origin, north pole, identity).
  virtual Point origin() const = 0;

  TangentVector zero(const Point& x) const;
  /// Gaussian ambient sample projected to T_x M, scaled to the given norm.
  TangentVector random_tangent(const Point& x, Rng& rng, double norm) const;
  /// exp of a random tangent at `center` with norm uniform in [0, radius].
  Point random_point(const Point& center, Rng& rng, double radius) const;

  std::string name() const { return to_string(kind()); }

 protected:
  void require_same_base(const TangentVector& u, const TangentVector& v) const;
  void require_kind(const Point& x) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int dim);

  ManifoldKind kind() const override { return ManifoldKind::Euclidean; }
  int dimension() const override { return dim_; }
  int ambient_rows() const override { return dim_; }

  double inner(const TangentVector& u, const TangentVector& v) const override;
  Point exp(const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  double distance(const Point& x, const Point& y) const override;
  TangentVector project_tangent(const Point& x, const Matrix& w) const override;
  Point retract_to_manifold(const Matrix& coords) const override;
  double curvature_min() const override { return 0.0; }
  double curvature_max() const override { return 0.0; }
  std::string check_point(const Point& x) const override;
  std::string check_tangent(const TangentVector& v) const override;
  Point origin() const override;

  Point point(const Vector& coords) const;

 private:
  int dim_;
};

/// Unit sphere S^{d-1} embedded in R^d.
class Sphere final : public Manifold {
 public:
  explicit Sphere(int ambient_dim);

  ManifoldKind kind() const override { return ManifoldKind::Sphere; }
  int dimension() const override { return n_ - 1; }
  int ambient_rows() const override { return n_; }

  double inner(const TangentVector& u, const TangentVector& v) const override;
  Point exp(const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  double distance(const Point& x, const Point& y) const override;
  TangentVector project_tangent(const Point& x, const Matrix& w) const override;
  Point retract_to_manifold(const Matrix& coords) const override;
  double curvature_min() const override { return 1.0; }
  double curvature_max() const override { return 1.0; }
  double injectivity_radius() const override;
  std::string check_point(const Point& x) const override;
  std::string check_tangent(const TangentVector& v) const override;
  Point origin() const override;

  Point point(const Vector& coords) const;

 private:
  int n_;
};

/// Symmetric positive definite d x d matrices with the affine-invariant
/// metric <X, Y>_P = tr(P^-1 X P^-1 Y).
class Spd final : public Manifold {
 public:
  explicit Spd(int d);

  ManifoldKind kind() const override { return ManifoldKind::Spd; }
  int dimension() const override { return d_ * (d_ + 1) / 2; }
  int ambient_rows() const override { return d_; }
  int ambient_cols() const override { return d_; }

  double inner(const TangentVector& u, const TangentVector& v) const override;
  Point exp(const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  double distance(const Point& x, const Point& y) const override;
  TangentVector project_tangent(const Point& x, const Matrix& w) const override;
  Point retract_to_manifold(const Matrix& coords) const override;
  double curvature_min() const override { return -0.5; }
  double curvature_max() const override { return 0.0; }
  std::string check_point(const Point& x) const override;
  std::string check_tangent(const TangentVector& v) const override;
  Point origin() const override;

  Point point(const Matrix& coords) const;

 private:
  int d_;
};

/// Hyperboloid model of H^d in R^{d+1}; the last coordinate is time-like.
class Hyperboloid final : public Manifold {
 public:
  explicit Hyperboloid(int d);

  ManifoldKind kind() const override { return ManifoldKind::Hyperboloid; }
  int dimension() const override { return d_; }
  int ambient_rows() const override { return d_ + 1; }

  double inner(const TangentVector& u, const TangentVector& v) const override;
  Point exp(const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const override;
  double distance(const Point& x, const Point& y) const override;
  TangentVector project_tangent(const Point& x, const Matrix& w) const override;
  Point retract_to_manifold(const Matrix& coords) const override;
  double curvature_min() const override { return -1.0; }
  double curvature_max() const override { return -1.0; }
  std::string check_point(const Point& x) const override;
  std::string check_tangent(const TangentVector& v) const override;
  Point origin() const override;

  Point point(const Vector& coords) const;
  /// Lifts spatial coordinates onto the upper sheet.
  Point lift(const Vector& spatial) const;

  static double minkowski(const Matrix& a, const Matrix& b);

 private:
  int d_;
};

ManifoldPtr make_manifold(ManifoldKind kind, int dim);

}  // namespace riemann_accel
