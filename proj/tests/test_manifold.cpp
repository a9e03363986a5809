#include "riemann_accel/geometry_constants.hpp"
#include "riemann_accel/manifold.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace riemann_accel;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::vector<ManifoldPtr> all_manifolds() {
  return {make_manifold(ManifoldKind::Euclidean, 4), make_manifold(ManifoldKind::Sphere, 5),
          make_manifold(ManifoldKind::Spd, 3), make_manifold(ManifoldKind::Hyperboloid, 3)};
}

// Norm cap for sampled tangent vectors: 0.9 x injectivity radius where it is
// finite, a moderate fixed radius otherwise.
double tangent_cap(const Manifold& m) {
  const double inj = m.injectivity_radius();
  return std::isfinite(inj) ? 0.9 * inj : 2.0;
}

double half_sq_dist(const Manifold& m, const Point& a, const Point& b) {
  const double d = m.distance(a, b);
  return 0.5 * d * d;
}

}  // namespace

TEST(Inner, EuclideanDotProduct) {
  Euclidean e(2);
  const Point x = e.point(vec({0, 0}));
  TangentVector u{x, vec({1, 0})};
  EXPECT_DOUBLE_EQ(e.inner(u, u), 1.0);
}

TEST(Inner, SpdAtIdentityIsFrobenius) {
  Spd spd(2);
  const Point p = spd.origin();
  TangentVector u{p, Matrix::Identity(2, 2)};
  EXPECT_NEAR(spd.inner(u, u), 2.0, 1e-15);
}

TEST(Inner, HyperboloidSpatialAxesOrthogonal) {
  Hyperboloid h(2);
  const Point x = h.point(vec({0, 0, 1}));
  EXPECT_DOUBLE_EQ(h.inner({x, vec({1, 0, 0})}, {x, vec({0, 1, 0})}), 0.0);
}

TEST(Inner, MismatchedBasesRejected) {
  Sphere s(3);
  const Point a = s.point(vec({1, 0, 0}));
  const Point b = s.point(vec({0, 1, 0}));
  EXPECT_THROW(s.inner({a, vec({0, 1, 0})}, {b, vec({1, 0, 0})}), ContractViolation);
}

TEST(Exp, ZeroVectorReturnsBase) {
  for (const auto& m : all_manifolds()) {
    Rng rng(3);
    const Point x = m->random_point(m->origin(), rng, 1.0);
    const Point y = m->exp(m->zero(x));
    EXPECT_LE((y.coords - x.coords).norm(), 1e-15 * (1.0 + x.coords.norm())) << m->name();
  }
}

TEST(Exp, SphereQuarterCircle) {
  Sphere s(3);
  const Point e1 = s.point(vec({1, 0, 0}));
  const Point y = s.exp({e1, vec({0, std::numbers::pi / 2, 0})});
  EXPECT_LE((y.coords - vec({0, 1, 0})).norm(), 1e-15);
}

TEST(Exp, SpdAtIdentityIsMatrixExponential) {
  Spd spd(2);
  Matrix v = Matrix::Zero(2, 2);
  v(0, 0) = 1.0;
  const Point y = spd.exp({spd.origin(), v});
  EXPECT_NEAR(y.coords(0, 0), std::exp(1.0), 1e-14);
  EXPECT_NEAR(y.coords(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(y.coords(0, 1), 0.0, 1e-14);
}

TEST(Log, SameBaseIsZero) {
  for (const auto& m : all_manifolds()) {
    Rng rng(5);
    const Point x = m->random_point(m->origin(), rng, 1.0);
    EXPECT_LE(m->norm(m->log(x, x)), 1e-7) << m->name();
  }
}

TEST(Log, SphereInvertsQuarterCircle) {
  Sphere s(3);
  const TangentVector v = s.log(s.point(vec({1, 0, 0})), s.point(vec({0, 1, 0})));
  EXPECT_NEAR(s.norm(v), std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(v.coords(1), std::numbers::pi / 2, 1e-14);
}

TEST(Log, SpdAtIdentityIsMatrixLogarithm) {
  Spd spd(2);
  Matrix q = Matrix::Identity(2, 2);
  q(0, 0) = std::exp(1.0);
  const TangentVector v = spd.log(spd.origin(), spd.point(q));
  EXPECT_NEAR(v.coords(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(v.coords(1, 1), 0.0, 1e-14);
}

TEST(Log, SphereAntipodalThrowsCutLocus) {
  Sphere s(3);
  EXPECT_THROW(s.log(s.point(vec({1, 0, 0})), s.point(vec({-1, 0, 0}))), CutLocusError);
}

TEST(Transport, SameEndpointsIsIdentity) {
  for (const auto& m : all_manifolds()) {
    Rng rng(7);
    const Point x = m->random_point(m->origin(), rng, 1.0);
    const TangentVector v = m->random_tangent(x, rng, 1.3);
    const TangentVector w = m->transport(x, x, v);
    EXPECT_LE((w.coords - v.coords).norm(), 1e-12) << m->name();
  }
}

TEST(Transport, SphereNormalDirectionFixed) {
  Sphere s(3);
  const Point e1 = s.point(vec({1, 0, 0}));
  const Point e2 = s.point(vec({0, 1, 0}));
  const TangentVector w = s.transport(e1, e2, {e1, vec({0, 0, 1})});
  EXPECT_LE((w.coords - vec({0, 0, 1})).norm(), 1e-15);
}

TEST(Transport, SphereAlongGeodesicRotatesVelocity) {
  Sphere s(3);
  const Point e1 = s.point(vec({1, 0, 0}));
  const Point e2 = s.point(vec({0, 1, 0}));
  const TangentVector w = s.transport(e1, e2, {e1, vec({0, 1, 0})});
  EXPECT_LE((w.coords - vec({-1, 0, 0})).norm(), 1e-15);
}

TEST(Transport, HyperboloidPreservesNorm) {
  Hyperboloid h(3);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Point x = h.random_point(h.origin(), rng, 2.0);
    const Point y = h.random_point(h.origin(), rng, 2.0);
    const TangentVector v = h.random_tangent(x, rng, 1.5);
    EXPECT_NEAR(h.norm(h.transport(x, y, v)), h.norm(v), 1e-9);
  }
}

TEST(Distance, Examples) {
  Sphere s(3);
  EXPECT_NEAR(s.distance(s.point(vec({1, 0, 0})), s.point(vec({0, 1, 0}))),
              std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(s.distance(s.point(vec({1, 0, 0})), s.point(vec({-1, 0, 0}))),
              std::numbers::pi, 1e-15);
  Spd spd(2);
  Matrix q = Matrix::Identity(2, 2);
  q(0, 0) = std::exp(1.0);
  EXPECT_NEAR(spd.distance(spd.origin(), spd.point(q)), 1.0, 1e-14);
  for (const auto& m : all_manifolds()) {
    Rng rng(13);
    const Point x = m->random_point(m->origin(), rng, 1.0);
    EXPECT_LE(m->distance(x, x), 1e-7) << m->name();
  }
}

TEST(ProjectTangent, Examples) {
  Sphere s(3);
  const Point e1 = s.point(vec({1, 0, 0}));
  EXPECT_LE(s.project_tangent(e1, vec({1, 0, 0})).coords.norm(), 1e-16);
  EXPECT_LE((s.project_tangent(e1, vec({0, 1, 0})).coords - vec({0, 1, 0})).norm(), 1e-16);
  Hyperboloid h(2);
  EXPECT_LE(h.project_tangent(h.point(vec({0, 0, 1})), vec({0, 0, 5})).coords.norm(), 1e-15);
}

TEST(ProjectTangent, IdempotentAndTangent) {
  for (const auto& m : all_manifolds()) {
    Rng rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    const Point x = m->random_point(m->origin(), rng, 1.0);
    Matrix w(m->ambient_rows(), m->ambient_cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
    const TangentVector p1 = m->project_tangent(x, w);
    const TangentVector p2 = m->project_tangent(x, p1.coords);
    EXPECT_TRUE(m->check_tangent(p1).empty()) << m->name();
    EXPECT_LE((p1.coords - p2.coords).norm(), 1e-12 * (1.0 + p1.coords.norm())) << m->name();
  }
}

TEST(PointInvariants, SamplesAreValid) {
  for (const auto& m : all_manifolds()) {
    Rng rng(19);
    for (int i = 0; i < 20; ++i) {
      const Point x = m->random_point(m->origin(), rng, 2.0);
      EXPECT_TRUE(m->check_point(x).empty()) << m->name() << ": " << m->check_point(x);
    }
  }
  Sphere s(3);
  EXPECT_FALSE(s.check_point(Point{ManifoldKind::Sphere, vec({1, 1, 0})}).empty());
  Hyperboloid h(2);
  EXPECT_FALSE(h.check_point(Point{ManifoldKind::Hyperboloid, vec({0, 0, -1})}).empty());
}

// Properties ---------------------------------------------------------------

TEST(ManifoldProperty, LogInvertsExp) {
  for (const auto& m : all_manifolds()) {
    Rng rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cap = tangent_cap(*m);
    for (int i = 0; i < 200; ++i) {
      const Point x = m->random_point(m->origin(), rng, 1.0);
      const TangentVector v = m->random_tangent(x, rng, cap * unit(rng));
      const TangentVector back = m->log(x, m->exp(v));
      const double err = m->norm(back - v);
      EXPECT_LE(err, 1e-7 * std::max(1.0, m->norm(v))) << m->name();
    }
  }
}

TEST(ManifoldProperty, ExpInvertsLogAndNormIsDistance) {
  for (const auto& m : all_manifolds()) {
    Rng rng(29);
    for (int i = 0; i < 100; ++i) {
      const Point x = m->random_point(m->origin(), rng, 1.2);
      const Point y = m->random_point(m->origin(), rng, 1.2);
      const TangentVector v = m->log(x, y);
      EXPECT_LE((m->exp(v).coords - y.coords).norm(), 1e-8 * (1.0 + y.coords.norm()))
          << m->name();
      EXPECT_NEAR(m->norm(v), m->distance(x, y), 1e-8) << m->name();
      EXPECT_NEAR(m->distance(x, y), m->distance(y, x), 1e-10) << m->name();
    }
  }
}

TEST(ManifoldProperty, TransportIsIsometryAndReversible) {
  for (const auto& m : all_manifolds()) {
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
      const Point x = m->random_point(m->origin(), rng, 1.2);
      const Point y = m->random_point(m->origin(), rng, 1.2);
      const TangentVector u = m->random_tangent(x, rng, 1.0);
      const TangentVector v = m->random_tangent(x, rng, 2.0);
      const double before = m->inner(u, v);
      const TangentVector tu = m->transport(x, y, u);
      const TangentVector tv = m->transport(x, y, v);
      EXPECT_LE(std::abs(before - m->inner(tu, tv)), 1e-9 * (1.0 + std::abs(before)))
          << m->name();
      EXPECT_TRUE(m->check_tangent(tv).empty()) << m->name();
      const TangentVector back = m->transport(y, x, tv);
      EXPECT_LE(m->norm(back - v), 1e-8) << m->name();
    }
  }
}

TEST(ManifoldProperty, GeodesicsHaveConstantSpeed) {
  for (const auto& m : all_manifolds()) {
    Rng rng(37);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const Point x = m->random_point(m->origin(), rng, 1.0);
      const TangentVector v = m->random_tangent(x, rng, 1.5 * unit(rng));
      const double t1 = unit(rng);
      const double t2 = unit(rng);
      const double d = m->distance(m->exp(t1 * v), m->exp(t2 * v));
      EXPECT_NEAR(d, std::abs(t2 - t1) * m->norm(v), 1e-7) << m->name();
    }
  }
}

TEST(ManifoldProperty, FirstVariationOfSquaredDistance) {
  const double h = 1e-5;
  for (const auto& m : all_manifolds()) {
    Rng rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const Point start = m->random_point(m->origin(), rng, 0.8);
      const Point target = m->random_point(m->origin(), rng, 0.8);
      const TangentVector v0 = m->random_tangent(start, rng, 1.0);
      const double t = unit(rng);
      const Point at = m->exp(t * v0);
      const TangentVector velocity = m->transport(start, at, v0);
      const double fd = (half_sq_dist(*m, m->exp((t + h) * v0), target) -
                         half_sq_dist(*m, m->exp((t - h) * v0), target)) /
                        (2.0 * h);
      const double exact = -m->inner(m->log(at, target), velocity);
      EXPECT_NEAR(fd, exact, 1e-4) << m->name();
    }
  }
}

TEST(ManifoldProperty, SecondVariationWithinCurvatureBand) {
  const double h = 1e-3;
  for (const auto& m : all_manifolds()) {
    Rng rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const Point start = m->random_point(m->origin(), rng, 0.7);
      const Point target = m->random_point(m->origin(), rng, 0.7);
      const TangentVector v0 = m->random_tangent(start, rng, 1.0);
      const double t = 0.2 + 0.6 * unit(rng);
      const Point at = m->exp(t * v0);
      const double f0 = half_sq_dist(*m, at, target);
      const double fp = half_sq_dist(*m, m->exp((t + h) * v0), target);
      const double fm = half_sq_dist(*m, m->exp((t - h) * v0), target);
      const double second = (fp - 2.0 * f0 + fm) / (h * h);

      double diameter = 0.0;
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        diameter = std::max(diameter, m->distance(m->exp(s * v0), target));
      }
      GeometryBounds bounds{m->curvature_min(), m->curvature_max(),
                            std::max(diameter, 1e-12)};
      const double zeta = compute_zeta(bounds);
      const double delta = compute_delta(bounds);
      const double speed2 = m->inner(v0, v0);
      EXPECT_GE(second, (delta - 1e-3) * speed2) << m->name();
      EXPECT_LE(second, (zeta + 1e-3) * speed2) << m->name();
    }
  }
}
