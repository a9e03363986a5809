#pragma once

#include "riemann_accel/manifold.hpp"
#include "riemann_accel/problem.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riemann_accel {

enum class Method { Rgd, RnagC, RnagSc, NagCEuclidean, NagScEuclidean };

std::string to_string(Method method);
/// Accepts rgd, rnag_c, rnag_sc, nag_c_euclidean, nag_sc_euclidean.
Method parse_method(const std::string& name);

/// A log or transport inside a step hit the cut locus. Carries the offending
/// pair and the iteration at which it happened.
class IterationFault : public std::runtime_error {
 public:
  IterationFault(const std::string& what, long iteration, Point from, Point to)
      : std::runtime_error(what), iteration_(iteration), from_(std::move(from)),
        to_(std::move(to)) {}
  long iteration() const { return iteration_; }
  const Point& from() const { return from_; }
  const Point& to() const { return to_; }

 private:
  long iteration_;
  Point from_;
  Point to_;
};

struct OptimizerConfig {
  Method method = Method::RnagC;
  double step_size = 0.0;
  double xi = 1.0;
  std::optional<double> T;   // rnag_c / nag_c_euclidean
  std::optional<double> mu;  // strongly convex methods
  long max_iters = 100;
  /// Stop once ||grad f(x_k)|| <= stop_grad_tol; 0 disables.
  double stop_grad_tol = 0.0;
  std::optional<double> diameter_guard;

  /// Throws ConfigError on missing or out-of-range parameters.
  void validate() const;
};

/// Iterate (x_k, vbar_k) of the accelerated methods together with the
/// intermediates of the step that produced it.
struct RnagState {
  long k = 0;
  Point x;
  TangentVector vbar;
  std::optional<Point> last_y;           // y_{k-1}
  std::optional<TangentVector> last_v;   // v_{k-1} at y_{k-1}
  std::optional<TangentVector> last_vbarbar;  // vbarbar_k at y_{k-1}
  std::optional<TangentVector> last_grad;     // grad f(y_{k-1})
  double last_grad_norm = 0.0;

  static RnagState start(const Manifold& m, const Point& x0);
};

/// Convex-method weight (k + 2 xi + T) / 2.
double rnag_lambda(long k, double xi, double T);

Point rgd_step(const Manifold& m, const Point& x, double s, const GradientOracle& grad);

RnagState rnag_c_step(const Manifold& m, const RnagState& state, double s, double xi,
                      double T, const GradientOracle& grad);

RnagState rnag_sc_step(const Manifold& m, const RnagState& state, double s, double xi,
                       double mu, const GradientOracle& grad);

/// Three-sequence flat-space form of the accelerated methods, used as an
/// independent reference for the manifold implementation.
struct NagState {
  long k = 0;
  Vector x;
  Vector y;
  Vector z;
};

enum class NagMode { Convex, StronglyConvex };

struct NagParams {
  double s = 1.0;
  double xi = 1.0;
  double T = 0.0;   // convex mode
  double mu = 0.0;  // strongly convex mode
};

/// Requires a Euclidean manifold (ConfigError otherwise). y of the returned
/// state is the extrapolation point used by the step.
NagState nag_euclidean_step(const Manifold& m, const NagState& state, NagMode mode,
                            const NagParams& params, const GradientOracle& grad);

namespace warning {
inline constexpr const char* kDiameter = "diameter";
inline constexpr const char* kInjectivity = "injectivity";
inline constexpr const char* kFault = "fault";
}  // namespace warning

struct TraceRecord {
  long iter = 0;
  double wall_time_s = 0.0;
  double f_gap = 0.0;
  double grad_norm = 0.0;
  double potential = 0.0;
  double dist_to_opt = 0.0;
  std::string warnings;
};

struct Trace {
  std::vector<TraceRecord> records;
  long gradient_calls = 0;
  /// Largest pairwise distance among visited x_k, y_k (only with a guard).
  double visited_diameter = 0.0;
  std::optional<std::string> fault;
  RnagState final_state;
};

struct RunCallbacks {
  /// Potential monitor; the potential column is NaN when unset.
  std::function<double(const RnagState&)> potential;
  /// Called after every iterate, including k = 0.
  std::function<void(const RnagState&)> on_iterate;
};

/// Runs the configured method from problem.x0. A cut-locus failure ends the
/// run and is stored in Trace::fault rather than thrown.
Trace run(const Problem& problem, const OptimizerConfig& config,
          const RunCallbacks& callbacks = {});

}  // namespace riemann_accel
