#pragma once

#include "riemann_accel/geometry_constants.hpp"
#include "riemann_accel/manifold.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riemann_accel {

using Objective = std::function<double(const Point&)>;
using GradientOracle = std::function<TangentVector(const Point&)>;
using PointSampler = std::function<Point(Rng&)>;

struct Optimum {
  Point x;
  double f = 0.0;
};

/// An objective with its Riemannian gradient on a fixed manifold, plus the
/// constants the methods and monitors need.
struct Problem {
  std::string name;
  ManifoldPtr manifold;
  Objective objective;
  GradientOracle gradient;
  GeometryBounds bounds;
  double L = 1.0;
  std::optional<double> mu;
  /// False when f is not geodesically convex on the domain (Rayleigh); the
  /// potential-function guarantees then do not apply.
  bool geodesically_convex = true;
  std::optional<Optimum> optimum;
  Point x0;
  /// Anchor points (Karcher data).
  std::vector<Point> data;
  /// Draws points from the region where L and mu are claimed to hold.
  PointSampler sample;

  double value(const Point& x) const { return objective(x); }
  TangentVector grad(const Point& x) const { return gradient(x); }
};

}  // namespace riemann_accel
