#include "riemann_accel/ode_flow.hpp"

#include "riemann_accel/optimizers.hpp"

#include <cmath>
#include <limits>

namespace riemann_accel {

double flow_friction(FlowKind kind, double t, const FlowParams& params) {
  if (kind == FlowKind::Convex) return (1.0 + 2.0 * params.xi) / t;
  return (1.0 / std::sqrt(params.xi) + std::sqrt(params.xi)) * std::sqrt(params.mu);
}

FlowState flow_step(const Manifold& m, const FlowState& state, double h, FlowKind kind,
                    const FlowParams& params, const GradientOracle& grad) {
  if (!(h > 0.0)) throw ContractViolation("flow_step: h must be positive");
  if (kind == FlowKind::Convex && !(state.t > 0.0)) {
    throw ContractViolation("flow_step: convex flow needs t > 0");
  }
  const double c = flow_friction(kind, state.t, params);
  const TangentVector w = (1.0 / (1.0 + h * c)) * (state.v - h * grad(state.y));
  FlowState next;
  next.t = state.t + h;
  next.y = m.exp(h * w);
  next.v = m.transport(state.y, next.y, w);
  return next;
}

std::vector<DeviationRow> discrete_vs_flow(const Problem& problem,
                                           const DiscreteVsFlowConfig& config) {
  const auto& ladder = config.s_ladder;
  if (ladder.empty()) throw ConfigError("ode: empty step-size ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw ConfigError("ode: step sizes must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) {
      throw ConfigError("ode: step-size ladder must be strictly decreasing");
    }
  }
  if (!(config.horizon > 0.0)) throw ConfigError("ode: horizon must be positive");
  if (config.samples < 1) throw ConfigError("ode: need at least one sample time");
  const double finest = std::sqrt(ladder.back());
  if (!(config.ref_step > 0.0) || config.ref_step > finest / 100.0) {
    throw ConfigError("ode: reference step must be positive and <= sqrt(min s) / 100");
  }
  if (config.kind == FlowKind::StronglyConvex && !(config.params.mu > 0.0)) {
    throw ConfigError("ode: strongly convex flow needs mu > 0");
  }

  const Manifold& m = *problem.manifold;
  const double xi = config.params.xi;
  const double T = config.T > 0.0 ? config.T : 4.0 * xi;
  const double f_star = problem.optimum ? problem.optimum->f
                                        : std::numeric_limits<double>::quiet_NaN();

  std::vector<DeviationRow> rows;
  for (double s : ladder) {
    const double root = std::sqrt(s);
    const long steps = static_cast<long>(std::ceil(config.horizon / root - 1e-9));
    const long per_step = static_cast<long>(std::ceil(root / config.ref_step - 1e-9));
    const double h = root / static_cast<double>(per_step);

    // Sample iterations k_j, j = 1..samples, uniformly spaced in time.
    std::vector<long> sample_iters;
    for (int j = 1; j <= config.samples; ++j) {
      const long k = std::lround(static_cast<double>(j) * steps / config.samples);
      if (sample_iters.empty() || k != sample_iters.back()) sample_iters.push_back(k);
    }

    // Discrete iterates y_k for k = 0..steps.
    std::vector<Point> y_iter;
    y_iter.reserve(steps + 1);
    RnagState state = RnagState::start(m, problem.x0);
    Point last_x = problem.x0;
    for (long k = 0; k <= steps; ++k) {
      if (config.kind == FlowKind::Convex) {
        state = rnag_c_step(m, state, s, xi, T, problem.gradient);
      } else {
        state = rnag_sc_step(m, state, s, xi, config.params.mu, problem.gradient);
      }
      y_iter.push_back(*state.last_y);
      if (k + 1 == steps) last_x = state.x;
    }

    // Reference flow from t0 = sqrt(s).
    FlowState flow{root, problem.x0, m.zero(problem.x0)};
    long flow_steps = 0;
    double worst = 0.0;
    std::size_t next_sample = 0;
    for (long k = 0; k <= steps && next_sample < sample_iters.size(); ++k) {
      if (k == sample_iters[next_sample]) {
        worst = std::max(worst, m.distance(y_iter[k], flow.y));
        ++next_sample;
      }
      if (k == steps) break;
      for (long i = 0; i < per_step; ++i) {
        flow = flow_step(m, flow, h, config.kind, config.params, problem.gradient);
        ++flow_steps;
      }
    }

    DeviationRow row;
    row.s = s;
    row.horizon = config.horizon;
    row.max_deviation = worst;
    row.final_f_gap_discrete = problem.value(last_x) - f_star;
    row.final_f_gap_flow = problem.value(flow.y) - f_star;
    row.discrete_steps = steps;
    row.flow_steps = flow_steps;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace riemann_accel
