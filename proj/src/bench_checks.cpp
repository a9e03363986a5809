#include "riemann_accel/bench.hpp"

#include "riemann_accel/diagnostics.hpp"
#include "riemann_accel/errors.hpp"
#include "riemann_accel/geometry_constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace riemann_accel::bench {

namespace {

constexpr double kRoundTripTol = 1e-7;
constexpr double kIsometryTol = 1e-9;
constexpr double kGradientTol = 1e-4;
constexpr double kBoundTol = 1e-6;
constexpr long kConditionHorizon = 1000000;

CheckRow row(std::string suite, std::string name, long samples, double slack, bool pass) {
  return {std::move(suite), std::move(name), samples, slack, pass};
}

std::vector<ManifoldPtr> suite_manifolds() {
  return {make_manifold(ManifoldKind::Euclidean, 3), make_manifold(ManifoldKind::Sphere, 3),
          make_manifold(ManifoldKind::Spd, 3), make_manifold(ManifoldKind::Hyperboloid, 3)};
}

std::vector<CheckRow> manifold_suite(std::uint64_t seed, int samples) {
  std::vector<CheckRow> rows;
  for (const ManifoldPtr& m : suite_manifolds()) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double inj = m->injectivity_radius();
    const double cap = std::isfinite(inj) ? 0.9 * inj : 3.0;
    double round_trip = 0.0;
    double isometry = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Point x = m->random_point(m->origin(), rng, 1.0);
      const TangentVector v = m->random_tangent(x, rng, cap * unit(rng));
      const Point y = m->exp(v);
      const double nv = m->norm(v);
      if (nv > 0.0) round_trip = std::max(round_trip, m->norm(m->log(x, y) - v) / nv);

      const TangentVector a = m->random_tangent(x, rng, 1.0);
      const TangentVector b = m->random_tangent(x, rng, 1.0 + unit(rng));
      const double before = m->inner(a, b);
      const double after = m->inner(m->transport(x, y, a), m->transport(x, y, b));
      const double scale = std::max(1.0, m->norm(a) * m->norm(b));
      isometry = std::max(isometry, std::abs(after - before) / scale);
    }
    rows.push_back(row("manifolds", m->name() + "/log_exp", samples, kRoundTripTol - round_trip,
                       round_trip <= kRoundTripTol));
    rows.push_back(row("manifolds", m->name() + "/transport_isometry", samples,
                       kIsometryTol - isometry, isometry <= kIsometryTol));
  }
  return rows;
}

std::vector<CheckRow> lemma_suite(std::uint64_t seed, int samples) {
  std::vector<CheckRow> rows;
  for (const ManifoldPtr& m : suite_manifolds()) {
    LemmaConfig cfg;
    cfg.manifold = m;
    cfg.samples = samples;
    cfg.seed = seed;
    const LemmaReport first = check_lemma1(cfg);
    const LemmaReport second = check_lemma2(cfg);
    rows.push_back(row("lemmas", "lemma1/" + m->name(), first.samples, first.worst_scaled_slack,
                       first.pass));
    rows.push_back(row("lemmas", "lemma2/" + m->name(), second.samples,
                       second.worst_scaled_slack, second.pass));
  }
  return rows;
}

struct ConditionTally {
  long cases = 0;
  double worst = std::numeric_limits<double>::infinity();
  bool pass = true;

  void add(const ConditionReport& r) {
    ++cases;
    worst = std::min(worst, 0.0 - r.worst_slack);
    if (r.asymptotic_slack > 0.0) worst = std::min(worst, 0.0 - r.asymptotic_slack);
    pass = pass && r.pass;
  }
};

void check_bounds(const GeometryBounds& bounds, ConditionTally& convex,
                  ConditionTally& strongly) {
  const DerivedConstants c = derive_constants(bounds);
  const RecommendedParams pc = recommended_params(bounds, ConvexityMode::Convex, 1.0);
  convex.add(check_thm1_condition(pc.xi, *pc.T, c.zeta, c.delta, kConditionHorizon));
  for (double ratio : {1.0, 0.1, 1e-3}) {
    const RecommendedParams ps =
        recommended_params(bounds, ConvexityMode::StronglyConvex, 1.0, ratio);
    strongly.add(check_thm2_condition(ps.xi, *ps.q, c.zeta, c.delta));
  }
}

std::vector<CheckRow> condition_suite(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  ConditionTally convex;
  ConditionTally strongly;
  for (double k_min : {-4.0, -1.0, -0.5, 0.0}) {
    for (double k_max : {0.0, 0.25, 1.0}) {
      for (double d : {0.1, 0.5, 1.0, 1.5, 2.5, 3.1}) {
        const GeometryBounds b{k_min, k_max, d};
        if (k_max > 0.0 && std::sqrt(k_max) * d >= std::numbers::pi) continue;
        check_bounds(b, convex, strongly);
      }
    }
  }
  rows.push_back(row("conditions", "thm1/grid", convex.cases, convex.worst, convex.pass));
  rows.push_back(row("conditions", "thm2/grid", strongly.cases, strongly.worst, strongly.pass));

  for (const NamedProblem& p : shipped_problems(seed)) {
    ConditionTally c1;
    ConditionTally c2;
    check_bounds(p.problem.bounds, c1, c2);
    rows.push_back(row("conditions", "thm1/" + p.name, c1.cases, c1.worst, c1.pass));
    rows.push_back(row("conditions", "thm2/" + p.name, c2.cases, c2.worst, c2.pass));
  }

  // xi = zeta with zeta > delta: the convex condition always fails through its
  // k -> infinity term. The strongly convex condition reduces to
  // (zeta - delta) (1 - sqrt(q/xi)) / 2 <= 1 - sqrt(xi q), which only fails
  // for a large enough gap.
  ConditionTally convex_rejected;
  ConditionTally strongly_matched;
  for (double k_min : {-4.0, -1.0, -0.5}) {
    for (double d : {0.5, 1.5, 2.5}) {
      const DerivedConstants c = derive_constants({k_min, 0.25, d});
      const double q = 1.0 / (9.0 * c.zeta);
      const ConditionReport r1 = check_thm1_condition(c.zeta, 4.0 * c.zeta, c.zeta, c.delta,
                                                      kConditionHorizon);
      ++convex_rejected.cases;
      convex_rejected.worst = std::min(convex_rejected.worst, r1.asymptotic_slack);
      convex_rejected.pass = convex_rejected.pass && !r1.pass;

      const ConditionReport r2 = check_thm2_condition(c.zeta, q, c.zeta, c.delta);
      const double margin = (1.0 - std::sqrt(c.zeta * q)) -
                            0.5 * (c.zeta - c.delta) * (1.0 - std::sqrt(q / c.zeta));
      ++strongly_matched.cases;
      strongly_matched.worst = std::min(strongly_matched.worst, std::abs(margin));
      strongly_matched.pass = strongly_matched.pass && r2.pass == (margin >= 0.0);
    }
  }
  rows.push_back(row("conditions", "thm1/xi_equals_zeta_rejected", convex_rejected.cases,
                     convex_rejected.worst, convex_rejected.pass));
  rows.push_back(row("conditions", "thm2/xi_equals_zeta_closed_form", strongly_matched.cases,
                     strongly_matched.worst, strongly_matched.pass));
  return rows;
}

std::vector<CheckRow> gradient_suite(std::uint64_t seed, int samples) {
  std::vector<CheckRow> rows;
  for (const NamedProblem& p : shipped_problems(seed)) {
    Rng rng(seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      worst = std::max(worst, gradient_check(p.problem, p.problem.sample(rng), 10, 1e-5, rng));
    }
    rows.push_back(row("gradients", "gradient/" + p.name, 200, kGradientTol - worst,
                       worst <= kGradientTol));
    const SmoothnessReport s = smoothness_probe(p.problem, samples, p.problem.L, p.problem.mu, rng);
    rows.push_back(row("gradients", "smoothness_L/" + p.name, s.pairs, s.worst_upper_margin,
                       s.upper_violations == 0));
    if (p.problem.mu) {
      rows.push_back(row("gradients", "strong_convexity_mu/" + p.name, s.pairs,
                         s.worst_lower_margin, s.lower_violations == 0));
    }
  }
  return rows;
}

std::vector<CheckRow> potential_suite(std::uint64_t seed) {
  struct Cell {
    const NamedProblem* problem;
    Method method;
    bool strongly;
    std::string label;
  };
  const std::vector<NamedProblem> problems = theory_problems(seed);
  std::vector<Cell> cells;
  for (const NamedProblem& p : problems) {
    cells.push_back({&p, Method::RnagC, false, "rnag_c"});
    cells.push_back({&p, Method::RnagSc, true, "rnag_sc"});
    cells.push_back({&p, Method::Rgd, false, "rgd_c"});
    cells.push_back({&p, Method::Rgd, true, "rgd_sc"});
  }
  std::vector<PotentialRun> runs(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Problem& problem = cells[i].problem->problem;
    runs[i] = run_with_potential(
        problem, theory_config(cells[i].method, cells[i].strongly, problem, cells[i].problem->iters));
  });
  std::vector<CheckRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const PotentialRun& r = runs[i];
    const std::string name = cells[i].label + "/" + cells[i].problem->name;
    const double increase = r.check.monotonicity.worst_increase;
    rows.push_back(row("potentials", name, r.check.checked,
                       std::isnan(increase) ? increase : -increase,
                       r.check.monotonicity.pass && !r.trace.fault));
    if (!std::isnan(r.worst_bound_ratio)) {
      rows.push_back(row("potentials", cells[i].label + "_gap_bound/" + cells[i].problem->name,
                         static_cast<long>(r.trace.records.size()), 1.0 - r.worst_bound_ratio,
                         r.worst_bound_ratio <= 1.0 + kBoundTol));
    }
  }
  return rows;
}

}  // namespace

std::vector<NamedProblem> shipped_problems(std::uint64_t seed) {
  std::vector<NamedProblem> out;
  out.push_back({"rayleigh_d50", make_rayleigh(50, seed), 2000});
  out.push_back({"karcher_spd_d10_n10", make_karcher(ManifoldKind::Spd, 10, 10, 100.0, seed), 500});
  out.push_back({"karcher_hyperbolic_d50_n10",
                 make_karcher(ManifoldKind::Hyperboloid, 50, 10, 1.0, seed), 500});
  out.push_back({"quadratic_d20", make_euclidean_quadratic(20, 1.0, 0.01, seed), 500});
  return out;
}

std::vector<NamedProblem> theory_problems(std::uint64_t seed) {
  std::vector<NamedProblem> out;
  out.push_back({"quadratic_d20", make_euclidean_quadratic(20, 1.0, 0.01, seed), 500});
  out.push_back({"karcher_hyperbolic_d10_n5",
                 make_karcher(ManifoldKind::Hyperboloid, 10, 5, 1.0, seed), 300});
  out.push_back({"karcher_spd_d5_n5", make_karcher(ManifoldKind::Spd, 5, 5, 100.0, seed), 300});
  return out;
}

OptimizerConfig theory_config(Method method, bool strongly_convex, const Problem& problem,
                              long max_iters) {
  MethodSpec spec;
  spec.label = to_string(method);
  spec.method = method;
  spec.xi = "theory";
  spec.step = "theory";
  if (strongly_convex || method == Method::RnagSc || method == Method::NagScEuclidean) {
    spec.mu = "problem";
  }
  return resolve_method(spec, problem, max_iters).config;
}

PotentialRun run_with_potential(const Problem& problem, const OptimizerConfig& config) {
  if (!problem.optimum) throw ConfigError("potential monitor needs a known optimum");
  const double zeta = compute_zeta(problem.bounds);
  const PotentialSpec spec = potential_spec_for(config, *problem.optimum, zeta);
  PotentialRun out;
  out.kind = spec.kind;
  RunCallbacks callbacks;
  callbacks.potential = [&](const RnagState& state) {
    out.values.push_back(potential(*problem.manifold, problem.objective, state, spec));
    return out.values.back().trace_value(spec.kind);
  };
  out.trace = run(problem, config, callbacks);
  out.check = check_potential_sequence(out.values, spec.kind);

  if (spec.kind != PotentialKind::RnagC && spec.kind != PotentialKind::RnagSc) return out;
  const double floor = potential_noise_floor(problem.optimum->f);
  const double log_phi0 = out.values.front().log_value;
  double worst = -std::numeric_limits<double>::infinity();
  for (const TraceRecord& r : out.trace.records) {
    double log_bound = 0.0;
    if (spec.kind == PotentialKind::RnagC) {
      const double lambda = rnag_lambda(r.iter - 1, spec.xi, spec.T);
      log_bound = log_phi0 - std::log(spec.s * lambda * lambda);
    } else {
      const double damp = std::sqrt(spec.mu * spec.s / spec.xi);
      log_bound = log_phi0 + static_cast<double>(r.iter) * std::log1p(-damp);
    }
    worst = std::max(worst, (r.f_gap - floor) / std::exp(log_bound));
  }
  out.worst_bound_ratio = worst;
  return out;
}

std::vector<std::string> check_suites() {
  return {"manifolds", "lemmas", "potentials", "conditions", "gradients"};
}

std::vector<CheckRow> run_check_suite(const std::string& suite, std::uint64_t seed,
                                      int samples) {
  if (suite == "manifolds") return manifold_suite(seed, samples);
  if (suite == "lemmas") return lemma_suite(seed, samples);
  if (suite == "potentials") return potential_suite(seed);
  if (suite == "conditions") return condition_suite(seed);
  if (suite == "gradients") return gradient_suite(seed, samples);
  std::string known;
  for (const auto& s : check_suites()) known += (known.empty() ? "" : ", ") + s;
  throw ConfigError("unknown suite '" + suite + "' (" + known + ")");
}

}  // namespace riemann_accel::bench
