#pragma once

#include "riemann_accel/diagnostics.hpp"
#include "riemann_accel/ode_flow.hpp"
#include "riemann_accel/optimizers.hpp"
#include "riemann_accel/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace riemann_accel::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitFault = 2;
inline constexpr int kExitConfig = 3;

inline constexpr const char* kTraceHeader =
    "iter,wall_time_s,f_gap,grad_norm,potential,dist_to_opt,warnings";
inline constexpr const char* kCheckHeader = "suite,case,samples,worst_slack,pass";
inline constexpr const char* kOdeHeader =
    "s,horizon_T,max_deviation,final_f_gap_discrete,final_f_gap_flow";

/// One [method.<label>] section. Symbolic values are resolved against the
/// problem by resolve_method.
struct MethodSpec {
  std::string label;
  Method method = Method::Rgd;
  /// A number, or "theory" for zeta + 3 (zeta - delta).
  std::string xi = "1";
  /// Defaults to 4 xi for the convex methods.
  std::optional<double> T;
  /// A number, "1/L", or "theory" (1/L convex, 1/(9 xi L) for rnag_sc,
  /// min(1/L, 1/(zeta mu)) for strongly convex rgd).
  std::string step = "1/L";
  /// Empty, "problem", or a number. Required by the strongly convex methods;
  /// selects the strongly convex potential for rgd.
  std::string mu;
  double stop_grad_tol = 0.0;
  std::optional<double> diameter_guard;
};

struct OdeSpec {
  std::vector<FlowKind> kinds{FlowKind::Convex};
  std::vector<double> s_ladder;
  double horizon = 5.0;
  double xi = 1.0;
  double mu = 0.0;
  /// Defaults to 4 xi.
  std::optional<double> T;
  /// Defaults to sqrt(min s) / 100.
  std::optional<double> ref_step;
  int samples = 100;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  long max_iters = 500;
  std::filesystem::path output_dir = "out";
  bool record_potential = true;
  bool record_distance = true;
  DatasetSpec problem;
  /// Problem overrides; 0 keeps the generator default.
  double L = 0.0;
  double mu = 0.0;
  std::vector<MethodSpec> methods;
  std::optional<OdeSpec> ode;
};

/// Parses the sectioned key = value format. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Commented config text for a preset. Throws ConfigError on unknown names.
std::string preset_config(const std::string& name);

struct ResolvedMethod {
  OptimizerConfig config;
  /// Outside the potential-function theorems: the problem is not
  /// geodesically convex, the step exceeds 1/L, or the parameter condition
  /// fails. Monotonicity is then reported but not asserted.
  bool heuristic = false;
};

ResolvedMethod resolve_method(const MethodSpec& spec, const Problem& problem, long max_iters);

Problem build_problem(const ExperimentConfig& config);

/// Writes a trace with the fixed column order; distances are left empty when
/// record_distance is false.
void write_trace_csv(std::ostream& out, const Trace& trace, bool record_distance);

/// "%.17g", with nan/inf spelled out.
std::string format_double(double v);

struct NamedProblem {
  std::string name;
  Problem problem;
  /// Iteration budget used by the potential checks.
  long iters = 300;
};

/// Desk-scale problems behind the presets: Rayleigh d=50, SPD Karcher d=10
/// n=10, hyperbolic Karcher d=50 n=10, Euclidean quadratic d=20.
std::vector<NamedProblem> shipped_problems(std::uint64_t seed);
/// Problems of the potential checks: Euclidean quadratic d=20 with condition
/// number 100, hyperbolic Karcher d=10 n=5, SPD Karcher d=5 n=5.
std::vector<NamedProblem> theory_problems(std::uint64_t seed);

/// Parameters under which the potential-function results apply: xi from the
/// problem bounds, T = 4 xi, s = 1/L (rnag_c, convex rgd), s = 1/(9 xi L)
/// (rnag_sc), s = min(1/L, 1/(zeta mu)) (strongly convex rgd).
OptimizerConfig theory_config(Method method, bool strongly_convex, const Problem& problem,
                              long max_iters);

struct PotentialRun {
  Trace trace;
  PotentialKind kind = PotentialKind::RnagC;
  std::vector<PotentialValue> values;
  PotentialCheck check;
  /// max over k of (f_gap_k - floor) / bound_k for the accelerated gap bounds
  /// phi_0 / (s lambda_{k-1}^2) and phi_0 (1 - sqrt(q/xi))^k; NaN for rgd.
  double worst_bound_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Runs with the matching potential monitor. Requires problem.optimum.
PotentialRun run_with_potential(const Problem& problem, const OptimizerConfig& config);

struct CheckRow {
  std::string suite;
  std::string case_name;
  long samples = 0;
  /// Margin by which the checked inequality holds; negative means violated.
  double worst_slack = 0.0;
  bool pass = false;
};

std::vector<std::string> check_suites();
/// Throws ConfigError on an unknown suite.
std::vector<CheckRow> run_check_suite(const std::string& suite, std::uint64_t seed,
                                      int samples);
void write_check_csv(std::ostream& out, const std::vector<CheckRow>& rows);

/// Worker count: RIEMANN_ACCEL_THREADS when set and positive, otherwise the
/// hardware concurrency.
unsigned worker_count();
/// Runs fn(0..n-1) on up to worker_count() threads. The first exception is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& suite, std::uint64_t seed, int samples,
              const std::optional<std::filesystem::path>& report_path, std::ostream& out,
              std::ostream& err);
int cmd_ode(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_emit_config(const std::string& preset,
                    const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                    std::ostream& err);

}  // namespace riemann_accel::bench
