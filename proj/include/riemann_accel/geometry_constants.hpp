#pragma once

#include "riemann_accel/errors.hpp"

#include <optional>

namespace riemann_accel {

/// Curvature range of the optimization domain and a bound on its diameter.
struct GeometryBounds {
  double k_min = 0.0;
  double k_max = 0.0;
  double diameter = 1.0;

  /// Throws DomainViolation on inverted bounds or when the positive-curvature
  /// diameter limit pi / sqrt(k_max) is reached.
  void validate() const;
};

/// sqrt(-K_min) D coth(sqrt(-K_min) D) for K_min < 0, otherwise 1.
double compute_zeta(const GeometryBounds& bounds);
/// sqrt(K_max) D cot(sqrt(K_max) D) for K_max > 0, otherwise 1.
double compute_delta(const GeometryBounds& bounds);

/// The default friction parameter zeta + 3 (zeta - delta).
double default_xi(double zeta, double delta);

struct DerivedConstants {
  double zeta = 1.0;
  double delta = 1.0;
  double xi = 1.0;
};

DerivedConstants derive_constants(const GeometryBounds& bounds);

enum class ConvexityMode { Convex, StronglyConvex };

struct RecommendedParams {
  double xi = 1.0;
  std::optional<double> T;  // convex mode only
  double s = 1.0;
  std::optional<double> q;  // strongly convex mode only
};

/// Parameters that make the potential-function theorems applicable:
/// convex: xi, T = 4 xi, s = 1/L; strongly convex: xi, s = 1/(9 xi L),
/// q = mu s.
RecommendedParams recommended_params(const GeometryBounds& bounds, ConvexityMode mode,
                                     double L, std::optional<double> mu = std::nullopt);

struct ConditionReport {
  bool pass = false;
  /// max(LHS - RHS) over everything evaluated; <= 0 means satisfied.
  double worst_slack = 0.0;
  /// For the convex condition: leading 1/lambda_k coefficient of LHS - RHS.
  double asymptotic_slack = 0.0;
  /// Iteration index of the worst finite-k slack.
  long worst_k = -1;
};

/// Parameter condition for the convex method, checked for k = 0..k_max_iter
/// and in the k -> infinity limit. Also requires xi >= zeta.
ConditionReport check_thm1_condition(double xi, double T, double zeta, double delta,
                                     long k_max_iter = 100000);

/// Parameter condition for the strongly convex method (single inequality).
/// Also requires xi >= zeta.
ConditionReport check_thm2_condition(double xi, double q, double zeta, double delta);

}  // namespace riemann_accel
