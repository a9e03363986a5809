#include "riemann_accel/diagnostics.hpp"

#include "riemann_accel/geometry_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace riemann_accel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLemmaTolerance = 1e-8;
constexpr double kSmoothnessTolerance = 1e-9;
constexpr int kMaxRejections = 100000;
constexpr double kBracketFloor = 1e-11;

bool strongly_convex(PotentialKind kind) {
  return kind == PotentialKind::RnagSc || kind == PotentialKind::RgdSc;
}

double sq(double v) { return v * v; }

PotentialValue from_phi(double phi) {
  PotentialValue out;
  out.raw = phi;
  out.value = phi;
  out.log_value = std::log(phi);
  out.resolved = std::isfinite(phi);
  return out;
}

PotentialValue from_bracket(double bracket, double log_factor, double floor) {
  PotentialValue out;
  out.raw = bracket;
  out.log_value = std::log(bracket) + log_factor;
  out.value = std::exp(out.log_value);
  out.resolved = bracket > floor && std::isfinite(out.log_value);
  return out;
}

struct GeodesicSample {
  Point p_a;
  Point p_b;
  Point x;
  TangentVector v_a;
  TangentVector a;
  double r = 0.0;
};

double observed_diameter(const Manifold& m, const GeodesicSample& g) {
  std::vector<Point> pts{g.p_a, g.p_b, g.x};
  const TangentVector step = m.log(g.p_a, g.p_b);
  for (double t : {0.25, 0.5, 0.75}) pts.push_back(m.exp(t * step));
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      d = std::max(d, m.distance(pts[i], pts[j]));
    }
  }
  return d;
}

// Runs one of the two distortion lemmas. `second` selects the a + b split.
LemmaReport check_lemma(const LemmaConfig& config, bool second) {
  if (!config.manifold) throw ContractViolation("lemma check: manifold missing");
  if (config.r && (*config.r < 0.0 || *config.r > 1.0 ||
                   (second && (*config.r <= 0.0 || *config.r >= 1.0)))) {
    throw ContractViolation("lemma check: r outside its admissible range");
  }
  const Manifold& m = *config.manifold;
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cap = config.radius_cap;

  LemmaReport report;
  const Point centre = m.origin();
  while (report.samples < config.samples) {
    if (report.rejected > kMaxRejections) {
      throw ContractViolation("lemma check: too many rejected samples");
    }
    try {
      GeodesicSample g;
      g.p_a = m.random_point(centre, rng, cap);
      g.x = m.random_point(g.p_a, rng, cap);
      TangentVector b = m.zero(g.p_a);
      g.a = m.zero(g.p_a);
      if (second) {
        if (!config.zero_a) g.a = m.random_tangent(g.p_a, rng, cap * unit(rng));
        b = m.random_tangent(g.p_a, rng, cap * unit(rng));
        g.v_a = g.a + b;
        do {
          g.r = config.r ? *config.r : unit(rng);
        } while (g.r <= 0.0 || g.r >= 1.0);
        g.p_b = m.exp(g.r * b);
      } else {
        g.v_a = m.random_tangent(g.p_a, rng, cap * unit(rng));
        g.r = config.r ? *config.r : unit(rng);
        g.p_b = m.exp(g.r * g.v_a);
      }

      const double diameter = 1.05 * observed_diameter(m, g);
      GeometryBounds bounds{m.curvature_min(), m.curvature_max(),
                            std::max(diameter, 1e-300)};
      const double zeta = config.zeta ? *config.zeta : compute_zeta(bounds);
      const double delta = config.delta ? *config.delta : compute_delta(bounds);
      const double xi = config.xi ? *config.xi : default_xi(zeta, delta);
      const double c = second ? xi : zeta;

      const TangentVector v_b =
          m.transport(g.p_a, g.p_b, g.v_a - m.log(g.p_a, g.p_b));
      const double lhs =
          sq(m.norm(v_b - m.log(g.p_b, g.x))) + (c - 1.0) * sq(m.norm(v_b));
      double rhs = sq(m.norm(g.v_a - m.log(g.p_a, g.x))) + (c - 1.0) * sq(m.norm(g.v_a));
      if (second) {
        rhs += 0.5 * (xi - delta) * (g.r / (1.0 - g.r)) * sq(m.norm(g.a));
      }
      const double slack = rhs - lhs;
      const double scaled = slack / (1.0 + std::abs(rhs));
      ++report.samples;
      report.worst_slack = std::min(report.worst_slack, slack);
      if (scaled < report.worst_scaled_slack) {
        report.worst_scaled_slack = scaled;
        std::ostringstream os;
        os.precision(6);
        os << "r=" << g.r << " |v_a|=" << m.norm(g.v_a) << " D=" << diameter
           << " zeta=" << zeta << " xi=" << xi << " lhs=" << lhs << " rhs=" << rhs;
        report.worst_case = os.str();
      }
      if (scaled < -kLemmaTolerance) report.pass = false;
    } catch (const CutLocusError&) {
      ++report.rejected;
    }
  }
  return report;
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::RnagC:
      return "rnag_c";
    case PotentialKind::RnagSc:
      return "rnag_sc";
    case PotentialKind::RgdC:
      return "rgd_c";
    case PotentialKind::RgdSc:
      return "rgd_sc";
  }
  return "unknown";
}

PotentialSpec potential_spec_for(const OptimizerConfig& config, const Optimum& optimum,
                                 double zeta) {
  PotentialSpec spec;
  spec.s = config.step_size;
  spec.xi = config.xi;
  spec.T = config.T.value_or(0.0);
  spec.mu = config.mu.value_or(0.0);
  spec.zeta = zeta;
  spec.x_star = optimum.x;
  spec.f_star = optimum.f;
  switch (config.method) {
    case Method::Rgd:
      spec.kind = config.mu ? PotentialKind::RgdSc : PotentialKind::RgdC;
      break;
    case Method::RnagC:
    case Method::NagCEuclidean:
      spec.kind = PotentialKind::RnagC;
      break;
    case Method::RnagSc:
    case Method::NagScEuclidean:
      spec.kind = PotentialKind::RnagSc;
      break;
  }
  return spec;
}

double PotentialValue::trace_value(PotentialKind kind) const {
  return strongly_convex(kind) ? log_value : value;
}

PotentialValue potential(const Manifold& m, const Objective& f, const RnagState& state,
                         const PotentialSpec& spec) {
  try {
    const double gap = f(state.x) - spec.f_star;
    const double k = static_cast<double>(state.k);
    switch (spec.kind) {
      case PotentialKind::RnagC: {
        const double lambda_prev = rnag_lambda(state.k - 1, spec.xi, spec.T);
        const TangentVector to_opt = m.log(state.x, spec.x_star);
        return from_phi(spec.s * sq(lambda_prev) * gap +
                        0.5 * spec.xi * sq(m.norm(state.vbar - to_opt)) +
                        0.5 * spec.xi * (spec.xi - 1.0) * sq(m.norm(state.vbar)));
      }
      case PotentialKind::RnagSc: {
        // y_k and v_k are functions of (x_k, vbar_k); at k = 0 they reduce to
        // x_0 and 0.
        const double r = std::sqrt(spec.xi * spec.mu * spec.s);
        const double damp = std::sqrt(spec.mu * spec.s / spec.xi);
        const Point y = m.exp((r / (1.0 + r)) * state.vbar);
        const TangentVector v =
            m.transport(state.x, y, state.vbar - m.log(state.x, y));
        const TangentVector to_opt = m.log(y, spec.x_star);
        const double bracket = gap + 0.5 * spec.mu * sq(m.norm(v - to_opt)) +
                               0.5 * spec.mu * (spec.xi - 1.0) * sq(m.norm(v));
        return from_bracket(bracket, -k * std::log1p(-damp),
                            potential_noise_floor(spec.f_star));
      }
      case PotentialKind::RgdC: {
        const TangentVector to_opt = m.log(state.x, spec.x_star);
        return from_phi(spec.s * (k + spec.zeta - 1.0) * gap + 0.5 * sq(m.norm(to_opt)));
      }
      case PotentialKind::RgdSc: {
        const TangentVector to_opt = m.log(state.x, spec.x_star);
        const double bracket = gap + 0.5 * spec.mu * sq(m.norm(to_opt));
        return from_bracket(bracket, -k * std::log1p(-spec.mu * spec.s),
                            potential_noise_floor(spec.f_star));
      }
    }
  } catch (const CutLocusError&) {
  }
  return {kNaN, kNaN, kNaN, false};
}

MonotonicityReport check_nonincreasing(const std::vector<double>& phi, double tol) {
  MonotonicityReport report;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    const double scale = std::max(1.0, phi[k]);
    const double increase = (phi[k + 1] - phi[k]) / scale;
    if (std::isnan(increase) || increase > report.worst_increase) {
      report.worst_increase = std::isnan(increase) ? kNaN : increase;
    }
    if (!(phi[k + 1] <= phi[k] + tol * scale) && report.pass) {
      report.pass = false;
      report.first_violation = static_cast<long>(k + 1);
    }
    if (std::isnan(report.worst_increase)) break;
  }
  return report;
}

MonotonicityReport check_nonincreasing_log(const std::vector<double>& log_phi, double tol) {
  MonotonicityReport report;
  for (std::size_t k = 0; k + 1 < log_phi.size(); ++k) {
    const double cur = log_phi[k];
    const double next = log_phi[k + 1];
    if (next <= cur) {
      report.worst_increase = std::max(report.worst_increase, next - cur);
      continue;
    }
    // phi_{k+1} <= phi_k + tol max(1, phi_k) in log form.
    const double allowance = std::log1p(tol * std::max(1.0, std::exp(-cur)));
    const double increase = next - cur;
    if (std::isnan(increase)) {
      report.worst_increase = kNaN;
    } else {
      report.worst_increase = std::max(report.worst_increase, increase);
    }
    if (!(increase <= allowance) && report.pass) {
      report.pass = false;
      report.first_violation = static_cast<long>(k + 1);
    }
  }
  return report;
}

LemmaReport check_lemma1(const LemmaConfig& config) { return check_lemma(config, false); }

LemmaReport check_lemma2(const LemmaConfig& config) { return check_lemma(config, true); }

double gradient_check(const Problem& problem, const Point& x, int directions, double h,
                      Rng& rng) {
  if (!(h >= 1e-7 && h <= 1e-3)) {
    throw ContractViolation("gradient_check: h must lie in [1e-7, 1e-3]");
  }
  const Manifold& m = *problem.manifold;
  const TangentVector g = problem.grad(x);
  const double scale = std::max(1.0, m.norm(g));
  double worst = 0.0;
  for (int i = 0; i < directions; ++i) {
    const TangentVector v = m.random_tangent(x, rng, 1.0);
    const double fd =
        (problem.value(m.exp(h * v)) - problem.value(m.exp((-h) * v))) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - m.inner(g, v)) / scale);
  }
  return worst;
}

SmoothnessReport smoothness_probe(const Problem& problem, int samples, double L_claimed,
                                  std::optional<double> mu_claimed, Rng& rng) {
  if (!problem.sample) throw ContractViolation("smoothness_probe: problem has no sampler");
  const Manifold& m = *problem.manifold;
  SmoothnessReport report;
  int rejected = 0;
  while (report.pairs < samples) {
    const Point x = problem.sample(rng);
    const Point y = problem.sample(rng);
    TangentVector u;
    try {
      u = m.log(x, y);
    } catch (const CutLocusError&) {
      if (++rejected > kMaxRejections) {
        throw ContractViolation("smoothness_probe: too many rejected pairs");
      }
      continue;
    }
    ++report.pairs;
    const double fx = problem.value(x);
    const double fy = problem.value(y);
    const double linear = fx + m.inner(problem.grad(x), u);
    const double dist2 = sq(m.norm(u));
    const double tol = kSmoothnessTolerance * (1.0 + std::abs(fx) + std::abs(fy));
    const double upper = linear + 0.5 * L_claimed * dist2 - fy;
    report.worst_upper_margin = std::min(report.worst_upper_margin, upper);
    if (upper < -tol) ++report.upper_violations;
    if (mu_claimed) {
      const double lower = fy - linear - 0.5 * *mu_claimed * dist2;
      report.worst_lower_margin = std::min(report.worst_lower_margin, lower);
      if (lower < -tol) ++report.lower_violations;
    }
  }
  return report;
}

double potential_noise_floor(double f_star) {
  return kBracketFloor * std::max(1.0, std::abs(f_star));
}

PotentialCheck check_potential_sequence(const std::vector<PotentialValue>& values,
                                        PotentialKind kind, double tol) {
  PotentialCheck out;
  std::vector<double> seq;
  for (const PotentialValue& v : values) {
    if (!v.resolved) {
      out.invalid = !(strongly_convex(kind) && std::isfinite(v.raw));
      break;
    }
    seq.push_back(strongly_convex(kind) ? v.log_value : v.value);
  }
  out.checked = static_cast<long>(seq.size());
  out.monotonicity =
      strongly_convex(kind) ? check_nonincreasing_log(seq, tol) : check_nonincreasing(seq, tol);
  if (out.invalid) out.monotonicity.pass = false;
  return out;
}

}  // namespace riemann_accel
