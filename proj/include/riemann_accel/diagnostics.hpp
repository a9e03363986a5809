#pragma once

#include "riemann_accel/manifold.hpp"
#include "riemann_accel/optimizers.hpp"
#include "riemann_accel/problem.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace riemann_accel {

enum class PotentialKind { RnagC, RnagSc, RgdC, RgdSc };

std::string to_string(PotentialKind kind);

struct PotentialSpec {
  PotentialKind kind = PotentialKind::RnagC;
  double s = 1.0;
  double xi = 1.0;
  double T = 0.0;     // rnag_c
  double mu = 0.0;    // strongly convex kinds
  double zeta = 1.0;  // rgd_c
  Point x_star;
  double f_star = 0.0;
};

/// Builds the monitor that matches an optimizer configuration.
PotentialSpec potential_spec_for(const OptimizerConfig& config, const Optimum& optimum,
                                 double zeta);

struct PotentialValue {
  /// Unscaled quantity: phi itself for the convex kinds, the bracket in
  /// front of the exponential factor for the strongly convex kinds.
  double raw = 0.0;
  /// log(phi), including the exponential factor.
  double log_value = 0.0;
  /// phi; may be +inf for long strongly convex runs.
  double value = 0.0;
  /// False once the strongly convex bracket sinks below the evaluation noise
  /// of f(x) - f*, or when the value is not finite.
  bool resolved = true;
  /// Value stored in a trace: phi for convex kinds, log(phi) otherwise.
  double trace_value(PotentialKind kind) const;
};

/// Evaluates the potential at an iterate. A cut-locus failure yields NaN
/// fields instead of throwing.
PotentialValue potential(const Manifold& m, const Objective& f, const RnagState& state,
                         const PotentialSpec& spec);

struct MonotonicityReport {
  bool pass = true;
  long first_violation = -1;
  /// Largest phi_{k+1} - phi_k seen, relative to max(1, phi_k).
  double worst_increase = -std::numeric_limits<double>::infinity();
};

/// phi_{k+1} <= phi_k + tol * max(1, phi_k) for every k.
MonotonicityReport check_nonincreasing(const std::vector<double>& phi, double tol = 1e-9);
/// Same test for a sequence given as log(phi).
MonotonicityReport check_nonincreasing_log(const std::vector<double>& log_phi,
                                           double tol = 1e-9);

/// Brackets at or below this are indistinguishable from rounding in f(x) - f*.
double potential_noise_floor(double f_star);

struct PotentialCheck {
  MonotonicityReport monotonicity;
  /// Number of leading values that were resolved and therefore checked.
  long checked = 0;
  /// A value that was neither resolved nor below the noise floor (NaN from a
  /// cut-locus failure, or an infinite phi).
  bool invalid = false;
};

/// Monotonicity over the resolved prefix of a potential sequence, in log
/// space for the strongly convex kinds.
PotentialCheck check_potential_sequence(const std::vector<PotentialValue>& values,
                                        PotentialKind kind, double tol = 1e-9);

struct LemmaConfig {
  ManifoldPtr manifold;
  int samples = 1000;
  /// Bound on the norm of sampled tangent vectors and on the spread of
  /// sampled points around the reference point.
  double radius_cap = 0.8;
  std::uint64_t seed = 0;
  /// Overrides; by default computed per sample from the manifold curvature
  /// and 1.05 x the observed diameter of the sampled configuration.
  std::optional<double> zeta;
  std::optional<double> delta;
  std::optional<double> xi;
  /// Fixed r instead of a uniform draw.
  std::optional<double> r;
  /// Second lemma only: force a = 0.
  bool zero_a = false;
};

struct LemmaReport {
  int samples = 0;
  int rejected = 0;
  /// min over samples of RHS - LHS.
  double worst_slack = std::numeric_limits<double>::infinity();
  /// min over samples of (RHS - LHS) / (1 + RHS).
  double worst_scaled_slack = std::numeric_limits<double>::infinity();
  bool pass = true;
  std::string worst_case;
};

LemmaReport check_lemma1(const LemmaConfig& config);
LemmaReport check_lemma2(const LemmaConfig& config);

/// Max relative mismatch between a central geodesic difference quotient and
/// <grad f(x), v> over random unit tangent directions.
double gradient_check(const Problem& problem, const Point& x, int directions, double h,
                      Rng& rng);

struct SmoothnessReport {
  int pairs = 0;
  int upper_violations = 0;
  int lower_violations = 0;
  /// min of RHS - LHS for the smoothness upper bound.
  double worst_upper_margin = std::numeric_limits<double>::infinity();
  /// min of LHS - RHS for the strong-convexity lower bound.
  double worst_lower_margin = std::numeric_limits<double>::infinity();
  bool pass() const { return upper_violations == 0 && lower_violations == 0; }
};

/// Checks the quadratic upper bound at L_claimed and, when given, the
/// quadratic lower bound at mu_claimed on pairs drawn by problem.sample.
SmoothnessReport smoothness_probe(const Problem& problem, int samples, double L_claimed,
                                  std::optional<double> mu_claimed, Rng& rng);

}  // namespace riemann_accel
