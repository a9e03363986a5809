#include "riemann_accel/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace riemann_accel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TangentVector guarded_log(const Manifold& m, const Point& x, const Point& y, long k) {
  try {
    return m.log(x, y);
  } catch (const CutLocusError& e) {
    throw IterationFault(e.what(), k, e.from(), e.to());
  }
}

TangentVector guarded_transport(const Manifold& m, const Point& x, const Point& y,
                                const TangentVector& v, long k) {
  try {
    return m.transport(x, y, v);
  } catch (const CutLocusError& e) {
    throw IterationFault(e.what(), k, e.from(), e.to());
  }
}

// Shared tail of both accelerated steps once y, g and the momentum weights
// are known.
struct Momentum {
  Point y;
  TangentVector v;
  TangentVector g;
};

Momentum momentum_at_y(const Manifold& m, const RnagState& state, double y_weight,
                       const GradientOracle& grad) {
  Point y = m.exp(y_weight * state.vbar);
  TangentVector g = grad(y);
  // v_k depends only on (x_k, y_k, vbar_k); computed before x_{k+1}.
  TangentVector to_y = guarded_log(m, state.x, y, state.k);
  TangentVector v = guarded_transport(m, state.x, y, state.vbar - to_y, state.k);
  return {std::move(y), std::move(v), std::move(g)};
}

RnagState finish_step(const Manifold& m, const RnagState& state, Momentum mom,
                      TangentVector vbarbar, double s) {
  Point x_next = m.exp((-s) * mom.g);
  TangentVector back = guarded_log(m, mom.y, x_next, state.k);
  TangentVector vbar_next =
      guarded_transport(m, mom.y, x_next, vbarbar - back, state.k);

  RnagState next;
  next.k = state.k + 1;
  next.x = std::move(x_next);
  next.vbar = std::move(vbar_next);
  next.last_grad_norm = m.norm(mom.g);
  next.last_y = std::move(mom.y);
  next.last_v = std::move(mom.v);
  next.last_vbarbar = std::move(vbarbar);
  next.last_grad = std::move(mom.g);
  return next;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Rgd:
      return "rgd";
    case Method::RnagC:
      return "rnag_c";
    case Method::RnagSc:
      return "rnag_sc";
    case Method::NagCEuclidean:
      return "nag_c_euclidean";
    case Method::NagScEuclidean:
      return "nag_sc_euclidean";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Rgd, Method::RnagC, Method::RnagSc, Method::NagCEuclidean,
                   Method::NagScEuclidean}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step size must be positive");
  }
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (stop_grad_tol < 0.0) throw ConfigError("stop_grad_tol must be >= 0");
  if (diameter_guard && !(*diameter_guard > 0.0)) {
    throw ConfigError("diameter guard must be positive");
  }
  const bool convex = method == Method::RnagC || method == Method::NagCEuclidean;
  const bool strongly = method == Method::RnagSc || method == Method::NagScEuclidean;
  if (convex || strongly) {
    if (!(xi >= 1.0)) throw ConfigError("xi must be >= 1");
  }
  if (convex && (!T || !(*T > 0.0))) throw ConfigError(to_string(method) + " needs T > 0");
  if (strongly) {
    if (!mu || !(*mu > 0.0)) throw ConfigError(to_string(method) + " needs mu > 0");
    if (std::sqrt(xi * *mu * step_size) >= 1.0) {
      throw ConfigError("sqrt(xi * mu * s) must be < 1");
    }
  }
}

RnagState RnagState::start(const Manifold& m, const Point& x0) {
  RnagState state;
  state.x = x0;
  state.vbar = m.zero(x0);
  return state;
}

double rnag_lambda(long k, double xi, double T) {
  return (static_cast<double>(k) + 2.0 * xi + T) / 2.0;
}

Point rgd_step(const Manifold& m, const Point& x, double s, const GradientOracle& grad) {
  return m.exp((-s) * grad(x));
}

RnagState rnag_c_step(const Manifold& m, const RnagState& state, double s, double xi,
                      double T, const GradientOracle& grad) {
  const double lambda = rnag_lambda(state.k, xi, T);
  if (!(lambda > xi)) throw ConfigError("rnag_c: lambda_k must exceed xi");
  Momentum mom = momentum_at_y(m, state, xi / (lambda + xi - 1.0), grad);
  TangentVector vbarbar = mom.v - (s * lambda / xi) * mom.g;
  return finish_step(m, state, std::move(mom), std::move(vbarbar), s);
}

RnagState rnag_sc_step(const Manifold& m, const RnagState& state, double s, double xi,
                       double mu, const GradientOracle& grad) {
  const double q = mu * s;
  const double r = std::sqrt(xi * q);
  if (!(r < 1.0)) throw ConfigError("rnag_sc: sqrt(xi q) must be < 1");
  const double damp = std::sqrt(q / xi);
  Momentum mom = momentum_at_y(m, state, r / (1.0 + r), grad);
  TangentVector vbarbar = (1.0 - damp) * mom.v + (-damp / mu) * mom.g;
  return finish_step(m, state, std::move(mom), std::move(vbarbar), s);
}

NagState nag_euclidean_step(const Manifold& m, const NagState& state, NagMode mode,
                            const NagParams& p, const GradientOracle& grad) {
  if (m.kind() != ManifoldKind::Euclidean) {
    throw ConfigError("nag_euclidean_step requires the Euclidean manifold");
  }
  NagState next;
  next.k = state.k + 1;
  if (mode == NagMode::Convex) {
    const double lambda = rnag_lambda(state.k, p.xi, p.T);
    next.y = state.x + (p.xi / (lambda + p.xi - 1.0)) * (state.z - state.x);
    const Vector g = grad(Point{ManifoldKind::Euclidean, next.y}).coords;
    next.x = next.y - p.s * g;
    next.z = state.z - (p.s * lambda / p.xi) * g;
    return next;
  }
  const double q = p.mu * p.s;
  const double r = std::sqrt(p.xi * q);
  const double damp = std::sqrt(q / p.xi);
  next.y = state.x + (r / (1.0 + r)) * (state.z - state.x);
  const Vector g = grad(Point{ManifoldKind::Euclidean, next.y}).coords;
  next.x = next.y - p.s * g;
  next.z = (1.0 - damp) * state.z + damp * (next.y - g / p.mu);
  return next;
}

Trace run(const Problem& problem, const OptimizerConfig& config,
          const RunCallbacks& callbacks) {
  config.validate();
  const Manifold& m = *problem.manifold;
  const bool flat_reference =
      config.method == Method::NagCEuclidean || config.method == Method::NagScEuclidean;
  if (flat_reference && m.kind() != ManifoldKind::Euclidean) {
    throw ConfigError(to_string(config.method) + " requires the Euclidean manifold");
  }

  Trace trace;
  GradientOracle counted = [&](const Point& p) {
    ++trace.gradient_calls;
    return problem.gradient(p);
  };

  RnagState state = RnagState::start(m, problem.x0);
  NagState flat;
  if (flat_reference) {
    flat.x = problem.x0.coords;
    flat.y = flat.x;
    flat.z = flat.x;
  }

  std::vector<Point> visited;
  bool diameter_exceeded = false;
  auto visit = [&](const Point& p) {
    if (!config.diameter_guard || diameter_exceeded) return;
    for (const Point& q : visited) {
      trace.visited_diameter = std::max(trace.visited_diameter, m.distance(p, q));
    }
    visited.push_back(p);
    if (trace.visited_diameter > *config.diameter_guard) diameter_exceeded = true;
  };

  const auto clock_start = std::chrono::steady_clock::now();
  auto record = [&](bool left_injectivity) {
    TraceRecord rec;
    rec.iter = state.k;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                    clock_start)
                          .count();
    const double f = problem.value(state.x);
    rec.f_gap = problem.optimum ? f - problem.optimum->f : kNaN;
    rec.grad_norm = m.norm(problem.grad(state.x));
    rec.potential = callbacks.potential ? callbacks.potential(state) : kNaN;
    rec.dist_to_opt = problem.optimum ? m.distance(state.x, problem.optimum->x) : kNaN;
    std::string flags;
    auto add_flag = [&](const char* flag) {
      if (!flags.empty()) flags += '|';
      flags += flag;
    };
    if (diameter_exceeded) add_flag(warning::kDiameter);
    if (left_injectivity) add_flag(warning::kInjectivity);
    rec.warnings = flags;
    if (callbacks.on_iterate) callbacks.on_iterate(state);
    trace.records.push_back(std::move(rec));
  };

  visit(state.x);
  record(false);
  const double inj = m.injectivity_radius();
  const double s = config.step_size;

  try {
    while (state.k < config.max_iters) {
      if (config.stop_grad_tol > 0.0 &&
          trace.records.back().grad_norm <= config.stop_grad_tol) {
        break;
      }
      bool left_injectivity = false;
      switch (config.method) {
        case Method::Rgd: {
          const TangentVector step = (-s) * counted(state.x);
          left_injectivity = m.norm(step) >= inj;
          RnagState next = RnagState::start(m, m.exp(step));
          next.k = state.k + 1;
          next.last_grad_norm = m.norm(step) / s;
          state = std::move(next);
          break;
        }
        case Method::RnagC: {
          const double lambda = rnag_lambda(state.k, config.xi, *config.T);
          const double pull = config.xi / (lambda + config.xi - 1.0) * m.norm(state.vbar);
          state = rnag_c_step(m, state, s, config.xi, *config.T, counted);
          left_injectivity = pull >= inj || s * state.last_grad_norm >= inj;
          break;
        }
        case Method::RnagSc: {
          const double r = std::sqrt(config.xi * *config.mu * s);
          const double pull = r / (1.0 + r) * m.norm(state.vbar);
          state = rnag_sc_step(m, state, s, config.xi, *config.mu, counted);
          left_injectivity = pull >= inj || s * state.last_grad_norm >= inj;
          break;
        }
        case Method::NagCEuclidean:
        case Method::NagScEuclidean: {
          NagParams params{s, config.xi, config.T.value_or(0.0), config.mu.value_or(0.0)};
          const NagMode mode = config.method == Method::NagCEuclidean
                                   ? NagMode::Convex
                                   : NagMode::StronglyConvex;
          const Vector z_before = flat.z;
          flat = nag_euclidean_step(m, flat, mode, params, counted);
          RnagState next;
          next.k = flat.k;
          next.x = Point{ManifoldKind::Euclidean, flat.x};
          next.vbar = TangentVector{next.x, flat.z - flat.x};
          next.last_y = Point{ManifoldKind::Euclidean, flat.y};
          next.last_v = TangentVector{*next.last_y, z_before - flat.y};
          state = std::move(next);
          break;
        }
      }
      if (state.last_y) visit(*state.last_y);
      visit(state.x);
      record(left_injectivity);
    }
  } catch (const IterationFault& fault) {
    trace.fault = fault.what();
    TraceRecord& tail = trace.records.back();
    tail.warnings += tail.warnings.empty() ? warning::kFault
                                           : std::string("|") + warning::kFault;
  }
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace riemann_accel
