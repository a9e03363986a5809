#pragma once

#include "riemann_accel/manifold.hpp"
#include "riemann_accel/problem.hpp"

#include <vector>

namespace riemann_accel {

enum class FlowKind { Convex, StronglyConvex };

struct FlowParams {
  double xi = 1.0;
  double mu = 0.0;  // strongly convex flow only
};

/// Position and velocity of the continuous-time curve.
struct FlowState {
  double t = 0.0;
  Point y;
  TangentVector v;
};

/// (1 + 2 xi) / t for the convex flow, (1/sqrt(xi) + sqrt(xi)) sqrt(mu) otherwise.
double flow_friction(FlowKind kind, double t, const FlowParams& params);

/// One semi-implicit step: friction implicit, gradient explicit.
///   w = (v - h grad f(y)) / (1 + h c(t)),  y' = exp_y(h w),  v' = transport(w).
FlowState flow_step(const Manifold& m, const FlowState& state, double h, FlowKind kind,
                    const FlowParams& params, const GradientOracle& grad);

struct DiscreteVsFlowConfig {
  FlowKind kind = FlowKind::Convex;
  /// Strictly decreasing step sizes of the discrete method.
  std::vector<double> s_ladder;
  double horizon = 5.0;
  FlowParams params;
  /// Convex method offset T; defaults to 4 xi when not positive.
  double T = 0.0;
  /// Reference integration step; must satisfy ref_step <= sqrt(min s) / 100.
  double ref_step = 0.0;
  int samples = 100;
};

struct DeviationRow {
  double s = 0.0;
  double horizon = 0.0;
  double max_deviation = 0.0;
  double final_f_gap_discrete = 0.0;
  double final_f_gap_flow = 0.0;
  long discrete_steps = 0;
  long flow_steps = 0;
};

/// For each s, runs ceil(horizon / sqrt(s)) discrete steps from problem.x0 and
/// the flow from t0 = sqrt(s) with zero velocity; y_k is compared against the
/// flow at time t0 + k sqrt(s) at `samples` uniformly spaced times. Throws
/// ConfigError on an invalid ladder or reference step.
std::vector<DeviationRow> discrete_vs_flow(const Problem& problem,
                                           const DiscreteVsFlowConfig& config);

}  // namespace riemann_accel
