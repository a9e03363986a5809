#pragma once

#include "riemann_accel/manifold.hpp"
#include "riemann_accel/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace riemann_accel {

enum class DatasetKind { Rayleigh, KarcherSpd, KarcherHyperbolic, EuclideanQuadratic };

std::string to_string(DatasetKind kind);
/// Accepts rayleigh, karcher_spd, karcher_hyperbolic, euclidean_quadratic.
DatasetKind parse_dataset_kind(const std::string& name);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::Rayleigh;
  int dimension = 10;
  int count = 10;
  double condition = 100.0;
  std::uint64_t seed = 0;
};

/// f(x) = -x^T A x / 2 on the unit sphere with A = (B + B^T)/2, B_ij ~ N(0, 1/d).
Problem make_rayleigh(int d, std::uint64_t seed);
/// Same objective for a given symmetric matrix; x0 is drawn from `seed`.
Problem make_rayleigh(const Matrix& a, std::uint64_t seed);

/// f(x) = (1/2n) sum_i d(x, p_i)^2 on SPD(d) or H^d. The optimum is filled in
/// by a long reference gradient run.
Problem make_karcher(ManifoldKind kind, int d, int n, double condition, std::uint64_t seed,
                     double L = 10.0);
Problem make_karcher(ManifoldPtr manifold, std::vector<Point> points, double L = 10.0);

/// f(x) = x^T H x / 2 with H diagonal, spectrum log-spaced in [mu, L].
Problem make_euclidean_quadratic(int d, double L, double mu, std::uint64_t seed);

/// Builds the problem described by a dataset spec. L and mu override the
/// problem defaults when positive (Karcher L; quadratic L and mu).
Problem make_problem(const DatasetSpec& spec, double L = 0.0, double mu = 0.0);

/// Random SPD matrices Q diag(exp(u)) Q^T with Q Haar-orthogonal and
/// u in [0, log(condition)], smallest and largest entry pinned to the ends.
std::vector<Point> generate_spd_dataset(int d, int n, double condition, std::uint64_t seed);

/// Points on H^d with spatial coordinates ~ N(0, 1/d).
std::vector<Point> generate_hyperbolic_dataset(int d, int n, std::uint64_t seed);

/// Reference minimizer of the Karcher objective: gradient iterations with
/// unit step (halved on increase) until ||grad|| <= tol.
Optimum karcher_reference_optimum(const Problem& problem, double tol = 1e-12,
                                  long max_iters = 100000);

/// Text format: a header line "dataset <kind> <rows> <cols> <count>" then one
/// block per point, rows separated by newlines, blocks by a blank line,
/// values with 17 significant digits.
void write_dataset(std::ostream& out, ManifoldKind kind, const std::vector<Point>& points);
std::vector<Point> read_dataset(std::istream& in);

}  // namespace riemann_accel
