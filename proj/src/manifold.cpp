#include "riemann_accel/manifold.hpp"

#include "riemann_accel/matrix_functions.hpp"

#include <cmath>
#include <numbers>

namespace riemann_accel {

namespace {

constexpr double kSeriesThreshold = 1e-4;
constexpr double kAntipodalTolerance = 1e-12;

// sin(t)/t
double sinc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// t/sin(t)
double inv_sinc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return t / std::sin(t);
}

// sinh(t)/t
double sinhc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sinh(t) / t;
}

// t/sinh(t)
double inv_sinhc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return t / std::sinh(t);
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean:
      return "euclidean";
    case ManifoldKind::Sphere:
      return "sphere";
    case ManifoldKind::Spd:
      return "spd";
    case ManifoldKind::Hyperboloid:
      return "hyperboloid";
  }
  return "unknown";
}

bool same_base(const TangentVector& u, const TangentVector& v) {
  const Matrix& a = u.base.coords;
  const Matrix& b = v.base.coords;
  if (u.base.kind != v.base.kind || a.rows() != b.rows() || a.cols() != b.cols()) {
    return false;
  }
  return (a - b).norm() <= 1e-12 * (1.0 + a.norm());
}

namespace {
void check_bases(const TangentVector& u, const TangentVector& v) {
  if (!same_base(u, v)) {
    throw ContractViolation("tangent vectors attached to different base points");
  }
}
}  // namespace

TangentVector operator+(const TangentVector& u, const TangentVector& v) {
  check_bases(u, v);
  return {u.base, u.coords + v.coords};
}

TangentVector operator-(const TangentVector& u, const TangentVector& v) {
  check_bases(u, v);
  return {u.base, u.coords - v.coords};
}

TangentVector operator-(const TangentVector& v) { return {v.base, -v.coords}; }

TangentVector operator*(double a, const TangentVector& v) {
  return {v.base, a * v.coords};
}

// ---------------------------------------------------------------------------
// Manifold (shared helpers)

double Manifold::norm(const TangentVector& v) const {
  return std::sqrt(std::max(0.0, inner(v, v)));
}

TangentVector Manifold::zero(const Point& x) const {
  require_kind(x);
  return {x, Matrix::Zero(x.coords.rows(), x.coords.cols())};
}

TangentVector Manifold::random_tangent(const Point& x, Rng& rng, double norm_value) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix w(ambient_rows(), ambient_cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = gauss(rng);
    TangentVector v = project_tangent(x, w);
    const double n = norm(v);
    if (n > 1e-8) return (norm_value / n) * v;
  }
  throw ContractViolation("could not sample a nonzero tangent vector");
}

Point Manifold::random_point(const Point& center, Rng& rng, double radius) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return exp(random_tangent(center, rng, radius * unit(rng)));
}

void Manifold::require_same_base(const TangentVector& u, const TangentVector& v) const {
  check_bases(u, v);
  require_kind(u.base);
}

void Manifold::require_kind(const Point& x) const {
  if (x.kind != kind() || x.coords.rows() != ambient_rows() ||
      x.coords.cols() != ambient_cols()) {
    throw ContractViolation("point does not belong to manifold " + name());
  }
}

// ---------------------------------------------------------------------------
// Euclidean

Euclidean::Euclidean(int dim) : dim_(dim) {
  if (dim < 1) throw ContractViolation("euclidean dimension must be positive");
}

Point Euclidean::point(const Vector& coords) const {
  Point p{ManifoldKind::Euclidean, coords};
  require_kind(p);
  return p;
}

double Euclidean::inner(const TangentVector& u, const TangentVector& v) const {
  require_same_base(u, v);
  return frobenius_inner(u.coords, v.coords);
}

Point Euclidean::exp(const TangentVector& v) const {
  require_kind(v.base);
  return {ManifoldKind::Euclidean, v.base.coords + v.coords};
}

TangentVector Euclidean::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  return {x, y.coords - x.coords};
}

TangentVector Euclidean::transport(const Point& x, const Point& y,
                                   const TangentVector& v) const {
  require_kind(x);
  require_kind(y);
  return {y, v.coords};
}

double Euclidean::distance(const Point& x, const Point& y) const {
  return (y.coords - x.coords).norm();
}

TangentVector Euclidean::project_tangent(const Point& x, const Matrix& w) const {
  require_kind(x);
  return {x, w};
}

Point Euclidean::retract_to_manifold(const Matrix& coords) const {
  return {ManifoldKind::Euclidean, coords};
}

std::string Euclidean::check_point(const Point& x) const {
  if (x.kind != kind() || x.coords.rows() != dim_ || x.coords.cols() != 1) {
    return "wrong shape for euclidean point";
  }
  if (!x.coords.allFinite()) return "non-finite coordinates";
  return {};
}

std::string Euclidean::check_tangent(const TangentVector& v) const {
  if (auto why = check_point(v.base); !why.empty()) return why;
  if (v.coords.rows() != dim_ || v.coords.cols() != 1) return "wrong tangent shape";
  return {};
}

Point Euclidean::origin() const { return {ManifoldKind::Euclidean, Vector::Zero(dim_)}; }

// ---------------------------------------------------------------------------
// Sphere

Sphere::Sphere(int ambient_dim) : n_(ambient_dim) {
  if (ambient_dim < 2) throw ContractViolation("sphere needs ambient dimension >= 2");
}

Point Sphere::point(const Vector& coords) const {
  return retract_to_manifold(coords);
}

double Sphere::inner(const TangentVector& u, const TangentVector& v) const {
  require_same_base(u, v);
  return frobenius_inner(u.coords, v.coords);
}

Point Sphere::exp(const TangentVector& v) const {
  require_kind(v.base);
  const double theta = v.coords.norm();
  if (theta == 0.0) return v.base;
  Matrix y = std::cos(theta) * v.base.coords + sinc(theta) * v.coords;
  return retract_to_manifold(y);
}

TangentVector Sphere::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  const double c = frobenius_inner(x.coords, y.coords);
  if (c <= -1.0 + kAntipodalTolerance) {
    throw CutLocusError("sphere log: antipodal points", x, y);
  }
  Matrix u = y.coords - c * x.coords;
  const double s = u.norm();
  if (s == 0.0) return zero(x);
  const double theta = std::atan2(s, c);
  return project_tangent(x, inv_sinc(theta) * u);
}

TangentVector Sphere::transport(const Point& x, const Point& y,
                                const TangentVector& v) const {
  require_kind(x);
  require_kind(y);
  const double c = frobenius_inner(x.coords, y.coords);
  if (c <= -1.0 + kAntipodalTolerance) {
    throw CutLocusError("sphere transport: antipodal points", x, y);
  }
  const double yv = frobenius_inner(y.coords, v.coords);
  Matrix w = v.coords - (yv / (1.0 + c)) * (x.coords + y.coords);
  return project_tangent(y, w);
}

double Sphere::distance(const Point& x, const Point& y) const {
  const double chord = (y.coords - x.coords).norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

TangentVector Sphere::project_tangent(const Point& x, const Matrix& w) const {
  require_kind(x);
  return {x, w - frobenius_inner(x.coords, w) * x.coords};
}

Point Sphere::retract_to_manifold(const Matrix& coords) const {
  const double n = coords.norm();
  if (n == 0.0) throw ContractViolation("cannot normalize a zero vector onto the sphere");
  return {ManifoldKind::Sphere, coords / n};
}

double Sphere::injectivity_radius() const { return std::numbers::pi; }

std::string Sphere::check_point(const Point& x) const {
  if (x.kind != kind() || x.coords.rows() != n_ || x.coords.cols() != 1) {
    return "wrong shape for sphere point";
  }
  if (std::abs(x.coords.norm() - 1.0) > 1e-10) return "sphere point is not unit norm";
  return {};
}

std::string Sphere::check_tangent(const TangentVector& v) const {
  if (auto why = check_point(v.base); !why.empty()) return why;
  if (v.coords.rows() != n_ || v.coords.cols() != 1) return "wrong tangent shape";
  if (std::abs(frobenius_inner(v.base.coords, v.coords)) > 1e-10 * (1.0 + v.coords.norm())) {
    return "sphere tangent not orthogonal to base";
  }
  return {};
}

Point Sphere::origin() const {
  Vector e = Vector::Zero(n_);
  e(0) = 1.0;
  return {ManifoldKind::Sphere, e};
}

// ---------------------------------------------------------------------------
// SPD

Spd::Spd(int d) : d_(d) {
  if (d < 1) throw ContractViolation("spd dimension must be positive");
}

Point Spd::point(const Matrix& coords) const {
  Point p{ManifoldKind::Spd, symmetrize(coords)};
  require_kind(p);
  return p;
}

double Spd::inner(const TangentVector& u, const TangentVector& v) const {
  require_same_base(u, v);
  Eigen::LLT<Matrix> llt(u.base.coords);
  const auto l = llt.matrixL();
  Matrix a = l.solve(u.coords);
  a = l.solve(a.transpose()).eval();
  Matrix b = l.solve(v.coords);
  b = l.solve(b.transpose()).eval();
  return frobenius_inner(a, b);
}

Point Spd::exp(const TangentVector& v) const {
  require_kind(v.base);
  if (v.coords.isZero(0.0)) return v.base;
  const SqrtPair root = sym_sqrt_pair(v.base.coords);
  Matrix inner_arg = symmetrize(root.inv_sqrt * v.coords * root.inv_sqrt);
  return retract_to_manifold(root.sqrt * sym_exp(inner_arg) * root.sqrt);
}

TangentVector Spd::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  const SqrtPair root = sym_sqrt_pair(x.coords);
  Matrix inner_arg = symmetrize(root.inv_sqrt * y.coords * root.inv_sqrt);
  return {x, symmetrize(root.sqrt * sym_log(inner_arg) * root.sqrt)};
}

TangentVector Spd::transport(const Point& x, const Point& y,
                             const TangentVector& v) const {
  require_kind(x);
  require_kind(y);
  const SqrtPair root = sym_sqrt_pair(x.coords);
  Matrix inner_arg = symmetrize(root.inv_sqrt * y.coords * root.inv_sqrt);
  // E = (Y X^-1)^{1/2} = X^{1/2} (X^{-1/2} Y X^{-1/2})^{1/2} X^{-1/2}
  Matrix e = root.sqrt * sym_sqrt(inner_arg) * root.inv_sqrt;
  return {y, symmetrize(e * v.coords * e.transpose())};
}

double Spd::distance(const Point& x, const Point& y) const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(y.coords, x.coords,
                                                       Eigen::EigenvaluesOnly);
  return ges.eigenvalues().array().log().matrix().norm();
}

TangentVector Spd::project_tangent(const Point& x, const Matrix& w) const {
  require_kind(x);
  return {x, symmetrize(w)};
}

Point Spd::retract_to_manifold(const Matrix& coords) const {
  return {ManifoldKind::Spd, symmetrize(coords)};
}

std::string Spd::check_point(const Point& x) const {
  if (x.kind != kind() || x.coords.rows() != d_ || x.coords.cols() != d_) {
    return "wrong shape for spd point";
  }
  const double scale = std::max(1.0, x.coords.cwiseAbs().maxCoeff());
  if ((x.coords - x.coords.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    return "spd point is not symmetric";
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(x.coords, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) return "spd point is not positive definite";
  return {};
}

std::string Spd::check_tangent(const TangentVector& v) const {
  if (auto why = check_point(v.base); !why.empty()) return why;
  if (v.coords.rows() != d_ || v.coords.cols() != d_) return "wrong tangent shape";
  const double scale = std::max(1.0, v.coords.cwiseAbs().maxCoeff());
  if ((v.coords - v.coords.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    return "spd tangent is not symmetric";
  }
  return {};
}

Point Spd::origin() const { return {ManifoldKind::Spd, Matrix::Identity(d_, d_)}; }

// ---------------------------------------------------------------------------
// Hyperboloid

Hyperboloid::Hyperboloid(int d) : d_(d) {
  if (d < 1) throw ContractViolation("hyperbolic dimension must be positive");
}

double Hyperboloid::minkowski(const Matrix& a, const Matrix& b) {
  const Eigen::Index last = a.rows() - 1;
  return a.topRows(last).cwiseProduct(b.topRows(last)).sum() - a(last, 0) * b(last, 0);
}

Point Hyperboloid::point(const Vector& coords) const {
  Point p{ManifoldKind::Hyperboloid, coords};
  require_kind(p);
  return p;
}

Point Hyperboloid::lift(const Vector& spatial) const {
  if (spatial.size() != d_) throw ContractViolation("lift: wrong spatial dimension");
  Vector full(d_ + 1);
  full.head(d_) = spatial;
  full(d_) = std::sqrt(1.0 + spatial.squaredNorm());
  return {ManifoldKind::Hyperboloid, full};
}

double Hyperboloid::inner(const TangentVector& u, const TangentVector& v) const {
  require_same_base(u, v);
  return minkowski(u.coords, v.coords);
}

Point Hyperboloid::exp(const TangentVector& v) const {
  require_kind(v.base);
  const double theta = std::sqrt(std::max(0.0, minkowski(v.coords, v.coords)));
  if (theta == 0.0) return v.base;
  Matrix y = std::cosh(theta) * v.base.coords + sinhc(theta) * v.coords;
  return retract_to_manifold(y);
}

TangentVector Hyperboloid::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  const double alpha = -minkowski(x.coords, y.coords);
  Matrix u = y.coords - alpha * x.coords;
  const double dist = distance(x, y);
  if (dist == 0.0) return zero(x);
  return project_tangent(x, inv_sinhc(dist) * u);
}

TangentVector Hyperboloid::transport(const Point& x, const Point& y,
                                     const TangentVector& v) const {
  require_kind(x);
  require_kind(y);
  const double alpha = -minkowski(x.coords, y.coords);
  const double yv = minkowski(y.coords, v.coords);
  Matrix w = v.coords + (yv / (1.0 + alpha)) * (x.coords + y.coords);
  return project_tangent(y, w);
}

double Hyperboloid::distance(const Point& x, const Point& y) const {
  Matrix diff = y.coords - x.coords;
  // <y-x, y-x>_L = 4 sinh^2(d/2)
  const double m = std::max(0.0, minkowski(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(m));
}

TangentVector Hyperboloid::project_tangent(const Point& x, const Matrix& w) const {
  require_kind(x);
  return {x, w + minkowski(x.coords, w) * x.coords};
}

Point Hyperboloid::retract_to_manifold(const Matrix& coords) const {
  return lift(coords.col(0).head(d_));
}

std::string Hyperboloid::check_point(const Point& x) const {
  if (x.kind != kind() || x.coords.rows() != d_ + 1 || x.coords.cols() != 1) {
    return "wrong shape for hyperboloid point";
  }
  if (std::abs(minkowski(x.coords, x.coords) + 1.0) > 1e-9) {
    return "hyperboloid point violates <x,x>_L = -1";
  }
  if (x.coords(d_, 0) <= 0.0) return "hyperboloid point on the lower sheet";
  return {};
}

std::string Hyperboloid::check_tangent(const TangentVector& v) const {
  if (auto why = check_point(v.base); !why.empty()) return why;
  if (v.coords.rows() != d_ + 1 || v.coords.cols() != 1) return "wrong tangent shape";
  if (std::abs(minkowski(v.base.coords, v.coords)) > 1e-9 * (1.0 + v.coords.norm())) {
    return "hyperboloid tangent not Minkowski-orthogonal to base";
  }
  return {};
}

Point Hyperboloid::origin() const {
  Vector e = Vector::Zero(d_ + 1);
  e(d_) = 1.0;
  return {ManifoldKind::Hyperboloid, e};
}

// ---------------------------------------------------------------------------

ManifoldPtr make_manifold(ManifoldKind kind, int dim) {
  switch (kind) {
    case ManifoldKind::Euclidean:
      return std::make_shared<Euclidean>(dim);
    case ManifoldKind::Sphere:
      return std::make_shared<Sphere>(dim);
    case ManifoldKind::Spd:
      return std::make_shared<Spd>(dim);
    case ManifoldKind::Hyperboloid:
      return std::make_shared<Hyperboloid>(dim);
  }
  throw ContractViolation("unknown manifold kind");
}

}  // namespace riemann_accel
