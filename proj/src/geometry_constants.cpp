#include "riemann_accel/geometry_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace riemann_accel {

namespace {

constexpr double kSmallArgument = 1e-4;
constexpr double kConditionTolerance = 1e-12;

// x coth(x) = 1 + x^2/3 - x^4/45 + 2x^6/945 - x^8/4725
double x_coth_x(double x) {
  if (std::abs(x) < kSmallArgument) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0 -
           x2 * x2 * x2 * x2 / 4725.0;
  }
  return x / std::tanh(x);
}

// x cot(x) = 1 - x^2/3 - x^4/45 - 2x^6/945 - x^8/4725
double x_cot_x(double x) {
  if (std::abs(x) < kSmallArgument) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 - x2 * x2 / 45.0 - 2.0 * x2 * x2 * x2 / 945.0 -
           x2 * x2 * x2 * x2 / 4725.0;
  }
  return x / std::tan(x);
}

}  // namespace

void GeometryBounds::validate() const {
  if (!(k_min <= k_max)) throw DomainViolation("geometry bounds: k_min > k_max");
  if (!(diameter > 0.0)) throw DomainViolation("geometry bounds: diameter must be > 0");
  if (k_max > 0.0 && std::sqrt(k_max) * diameter >= std::numbers::pi) {
    throw DomainViolation("geometry bounds: diameter must be below pi / sqrt(k_max)");
  }
}

double compute_zeta(const GeometryBounds& bounds) {
  if (bounds.k_min >= 0.0) return 1.0;
  return x_coth_x(std::sqrt(-bounds.k_min) * bounds.diameter);
}

double compute_delta(const GeometryBounds& bounds) {
  if (bounds.k_max <= 0.0) return 1.0;
  const double x = std::sqrt(bounds.k_max) * bounds.diameter;
  if (x >= std::numbers::pi) {
    throw DomainViolation("delta: sqrt(k_max) * D must stay below pi");
  }
  return x_cot_x(x);
}

double default_xi(double zeta, double delta) { return zeta + 3.0 * (zeta - delta); }

DerivedConstants derive_constants(const GeometryBounds& bounds) {
  bounds.validate();
  DerivedConstants c;
  c.zeta = compute_zeta(bounds);
  c.delta = compute_delta(bounds);
  c.xi = default_xi(c.zeta, c.delta);
  return c;
}

RecommendedParams recommended_params(const GeometryBounds& bounds, ConvexityMode mode,
                                     double L, std::optional<double> mu) {
  if (!(L > 0.0)) throw ContractViolation("recommended_params: L must be positive");
  const DerivedConstants c = derive_constants(bounds);
  RecommendedParams p;
  p.xi = c.xi;
  if (mode == ConvexityMode::Convex) {
    p.T = 4.0 * p.xi;
    p.s = 1.0 / L;
    return p;
  }
  if (!mu || !(*mu > 0.0)) {
    throw ContractViolation("recommended_params: strongly convex mode needs mu > 0");
  }
  if (*mu > L) throw ContractViolation("recommended_params: mu must not exceed L");
  p.s = 1.0 / (9.0 * p.xi * L);
  p.q = *mu * p.s;
  return p;
}

ConditionReport check_thm1_condition(double xi, double T, double zeta, double delta,
                                     long k_max_iter) {
  if (!(T > 0.0) || !(xi >= 1.0)) {
    throw DomainViolation("thm1 condition: need T > 0 and xi >= 1 so that lambda_k > xi");
  }
  ConditionReport report;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= k_max_iter; ++k) {
    const double lambda = (static_cast<double>(k) + 2.0 * xi + T) / 2.0;
    if (!(lambda > xi)) throw DomainViolation("thm1 condition: lambda_k <= xi");
    // 1/(1 - xi/lambda) - 1 = xi / (lambda - xi)
    const double lhs = 0.5 * (xi - delta) * xi / (lambda - xi);
    // tau = xi/(lambda + xi - 1);  1/(1-tau)^2 - 1 = tau (2 - tau) / (1 - tau)^2
    const double tau = xi / (lambda + xi - 1.0);
    const double one_minus = (lambda - 1.0) / (lambda + xi - 1.0);
    const double rhs = (xi - zeta) * tau * (2.0 - tau) / (one_minus * one_minus);
    const double slack = lhs - rhs;
    if (slack > report.worst_slack) {
      report.worst_slack = slack;
      report.worst_k = k;
    }
  }
  // As lambda -> inf: LHS ~ (xi - delta) xi / (2 lambda), RHS ~ 2 xi (xi - zeta) / lambda.
  report.asymptotic_slack = 0.5 * (xi - delta) * xi - 2.0 * xi * (xi - zeta);
  report.pass = xi >= zeta && report.worst_slack <= kConditionTolerance &&
                report.asymptotic_slack <= kConditionTolerance;
  return report;
}

ConditionReport check_thm2_condition(double xi, double q, double zeta, double delta) {
  if (!(q > 0.0) || !(xi >= 1.0)) {
    throw DomainViolation("thm2 condition: need q > 0 and xi >= 1");
  }
  const double r = std::sqrt(xi * q);
  if (r >= 1.0) throw DomainViolation("thm2 condition: sqrt(xi q) must be < 1");
  const double damp = 1.0 - std::sqrt(q / xi);
  const double lhs = 0.5 * (xi - delta) * (r / (1.0 - r)) * damp * damp - r * damp;
  // 1 / (1 - r/(1+r))^2 - 1 = (1 + r)^2 - 1 = r (2 + r)
  const double rhs = (xi - zeta) * r * (2.0 + r);
  ConditionReport report;
  report.worst_slack = lhs - rhs;
  report.asymptotic_slack = report.worst_slack;
  report.worst_k = 0;
  report.pass = xi >= zeta && report.worst_slack <= kConditionTolerance;
  return report;
}

}  // namespace riemann_accel
