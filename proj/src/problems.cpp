#include "riemann_accel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <numbers>
#include <sstream>

namespace riemann_accel {

namespace {

Vector gaussian_vector(int n, double stddev, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, stddev);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

Matrix haar_orthogonal(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

double max_pairwise_distance(const Manifold& m, const std::vector<Point>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      d = std::max(d, m.distance(pts[i], pts[j]));
    }
  }
  return d;
}

Point uniform_on_sphere(const Sphere& sphere, int n, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(n, 1.0, rng);
    const double len = v.norm();
    if (len > 1e-12) return sphere.point(v / len);
  }
}

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Rayleigh:
      return "rayleigh";
    case DatasetKind::KarcherSpd:
      return "karcher_spd";
    case DatasetKind::KarcherHyperbolic:
      return "karcher_hyperbolic";
    case DatasetKind::EuclideanQuadratic:
      return "euclidean_quadratic";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(const std::string& name) {
  for (DatasetKind k : {DatasetKind::Rayleigh, DatasetKind::KarcherSpd,
                        DatasetKind::KarcherHyperbolic, DatasetKind::EuclideanQuadratic}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown problem kind '" + name + "'");
}

Problem make_rayleigh(int d, std::uint64_t seed) {
  if (d < 2) throw ContractViolation("make_rayleigh: d must be >= 2");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  Matrix b(d, d);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = gauss(rng);
  return make_rayleigh(Matrix(0.5 * (b + b.transpose())), rng());
}

Problem make_rayleigh(const Matrix& a, std::uint64_t seed) {
  const int d = static_cast<int>(a.rows());
  if (d < 2 || a.cols() != d) throw ContractViolation("make_rayleigh: A must be square, d >= 2");
  auto sphere = std::make_shared<Sphere>(d);
  const Matrix sym = 0.5 * (a + a.transpose());

  Problem p;
  p.name = "rayleigh";
  p.geodesically_convex = false;
  p.manifold = sphere;
  p.objective = [sym](const Point& x) {
    return -0.5 * x.coords.col(0).dot(sym * x.coords.col(0));
  };
  p.gradient = [sym, sphere](const Point& x) {
    return sphere->project_tangent(x, -(sym * x.coords));
  };

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(d - 1);
  p.L = lmax - lmin;
  p.bounds = GeometryBounds{1.0, 1.0, std::numbers::pi - 1e-3};

  Rng rng(seed);
  p.x0 = uniform_on_sphere(*sphere, d, rng);
  Vector top = eig.eigenvectors().col(d - 1);
  if (top.dot(p.x0.coords.col(0)) < 0.0) top = -top;
  p.optimum = Optimum{sphere->point(top), -0.5 * lmax};
  p.sample = [sphere, d](Rng& r) { return uniform_on_sphere(*sphere, d, r); };
  return p;
}

std::vector<Point> generate_spd_dataset(int d, int n, double condition, std::uint64_t seed) {
  if (d < 1 || n < 1) throw ContractViolation("generate_spd_dataset: d, n must be >= 1");
  if (!(condition >= 1.0)) throw ContractViolation("generate_spd_dataset: condition >= 1");
  Rng rng(seed);
  const double top = std::log(condition);
  std::uniform_real_distribution<double> spread(0.0, top);
  std::vector<Point> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Matrix q = haar_orthogonal(d, rng);
    Vector u(d);
    for (int j = 0; j < d; ++j) u(j) = spread(rng);
    u(0) = 0.0;
    if (d > 1) u(1) = top;
    Matrix p = q * u.array().exp().matrix().asDiagonal() * q.transpose();
    out.push_back({ManifoldKind::Spd, 0.5 * (p + p.transpose())});
  }
  return out;
}

std::vector<Point> generate_hyperbolic_dataset(int d, int n, std::uint64_t seed) {
  if (d < 1 || n < 1) throw ContractViolation("generate_hyperbolic_dataset: d, n >= 1");
  Rng rng(seed);
  Hyperboloid h(d);
  std::vector<Point> out;
  out.reserve(n);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < n; ++i) out.push_back(h.lift(gaussian_vector(d, stddev, rng)));
  return out;
}

Problem make_karcher(ManifoldKind kind, int d, int n, double condition, std::uint64_t seed,
                     double L) {
  if (kind == ManifoldKind::Spd) {
    return make_karcher(std::make_shared<Spd>(d), generate_spd_dataset(d, n, condition, seed),
                        L);
  }
  if (kind == ManifoldKind::Hyperboloid) {
    return make_karcher(std::make_shared<Hyperboloid>(d),
                        generate_hyperbolic_dataset(d, n, seed), L);
  }
  throw ContractViolation("make_karcher: manifold must be spd or hyperboloid");
}

Problem make_karcher(ManifoldPtr manifold, std::vector<Point> points, double L) {
  if (points.empty()) throw ContractViolation("make_karcher: need at least one point");
  const Manifold& m = *manifold;
  for (const Point& p : points) {
    const std::string why = m.check_point(p);
    if (!why.empty()) throw ContractViolation("make_karcher: invalid data point: " + why);
  }
  auto data = std::make_shared<const std::vector<Point>>(points);
  const double n = static_cast<double>(points.size());

  Problem p;
  p.name = manifold->kind() == ManifoldKind::Spd ? "karcher_spd"
           : manifold->kind() == ManifoldKind::Hyperboloid
               ? "karcher_hyperbolic"
               : "karcher_" + manifold->name();
  p.manifold = manifold;
  p.objective = [manifold, data, n](const Point& x) {
    double sum = 0.0;
    for (const Point& q : *data) {
      const double dist = manifold->distance(x, q);
      sum += dist * dist;
    }
    return sum / (2.0 * n);
  };
  p.gradient = [manifold, data, n](const Point& x) {
    Matrix acc = Matrix::Zero(x.coords.rows(), x.coords.cols());
    for (const Point& q : *data) acc -= manifold->log(x, q).coords;
    return manifold->project_tangent(x, acc / n);
  };
  p.L = L;
  p.mu = 1.0;
  const double diameter = 1.05 * max_pairwise_distance(m, points);
  p.bounds = GeometryBounds{m.curvature_min(), m.curvature_max(), std::max(diameter, 1e-12)};
  p.x0 = points.front();
  p.data = points;
  p.sample = [manifold, data](Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, data->size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point x = (*data)[pick(rng)];
    for (int round = 0; round < 3; ++round) {
      const Point& q = (*data)[pick(rng)];
      x = manifold->exp(unit(rng) * manifold->log(x, q));
    }
    return x;
  };
  p.optimum = karcher_reference_optimum(p);
  return p;
}

Optimum karcher_reference_optimum(const Problem& problem, double tol, long max_iters) {
  const Manifold& m = *problem.manifold;
  Point x = problem.x0;
  double f = problem.value(x);
  double s = 1.0;
  for (long it = 0; it < max_iters; ++it) {
    const TangentVector g = problem.grad(x);
    if (m.norm(g) <= tol) break;
    const Point trial = m.exp((-s) * g);
    const double ft = problem.value(trial);
    if (ft > f + 1e-14 * (1.0 + std::abs(f)) && s > 1e-6) {
      s *= 0.5;
      continue;
    }
    x = trial;
    f = ft;
  }
  return {x, f};
}

Problem make_euclidean_quadratic(int d, double L, double mu, std::uint64_t seed) {
  if (d < 1) throw ContractViolation("make_euclidean_quadratic: d must be >= 1");
  if (!(mu > 0.0) || !(mu <= L)) {
    throw ContractViolation("make_euclidean_quadratic: need 0 < mu <= L");
  }
  Vector h(d);
  for (int i = 0; i < d; ++i) {
    const double t = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
    h(i) = mu * std::pow(L / mu, t);
  }
  if (d > 1) h(d - 1) = L;
  auto space = std::make_shared<Euclidean>(d);

  Problem p;
  p.name = "euclidean_quadratic";
  p.manifold = space;
  p.objective = [h](const Point& x) {
    return 0.5 * x.coords.col(0).dot(h.cwiseProduct(x.coords.col(0)));
  };
  p.gradient = [h](const Point& x) {
    return TangentVector{x, h.cwiseProduct(x.coords.col(0))};
  };
  p.L = L;
  p.mu = mu;
  p.bounds = GeometryBounds{0.0, 0.0, 1.0};
  Rng rng(seed);
  p.x0 = space->point(gaussian_vector(d, 1.0, rng));
  p.optimum = Optimum{space->origin(), 0.0};
  p.sample = [space, d](Rng& r) { return space->point(gaussian_vector(d, 1.0, r)); };
  return p;
}

Problem make_problem(const DatasetSpec& spec, double L, double mu) {
  switch (spec.kind) {
    case DatasetKind::Rayleigh:
      return make_rayleigh(spec.dimension, spec.seed);
    case DatasetKind::KarcherSpd:
      return make_karcher(ManifoldKind::Spd, spec.dimension, spec.count, spec.condition,
                          spec.seed, L > 0.0 ? L : 10.0);
    case DatasetKind::KarcherHyperbolic:
      return make_karcher(ManifoldKind::Hyperboloid, spec.dimension, spec.count,
                          spec.condition, spec.seed, L > 0.0 ? L : 10.0);
    case DatasetKind::EuclideanQuadratic: {
      const double top = L > 0.0 ? L : 1.0;
      const double bottom = mu > 0.0 ? mu : top / spec.condition;
      return make_euclidean_quadratic(spec.dimension, top, bottom, spec.seed);
    }
  }
  throw ConfigError("unknown dataset kind");
}

void write_dataset(std::ostream& out, ManifoldKind kind, const std::vector<Point>& points) {
  const Eigen::Index rows = points.empty() ? 0 : points.front().coords.rows();
  const Eigen::Index cols = points.empty() ? 0 : points.front().coords.cols();
  out << "dataset " << to_string(kind) << ' ' << rows << ' ' << cols << ' '
      << points.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) out << '\n';
    const Matrix& c = points[i].coords;
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (j > 0) out << ' ';
        out << c(r, j);
      }
      out << '\n';
    }
  }
}

std::vector<Point> read_dataset(std::istream& in) {
  std::string tag, kind_name;
  long rows = 0, cols = 0, count = 0;
  if (!(in >> tag >> kind_name >> rows >> cols >> count) || tag != "dataset") {
    throw ConfigError("dataset: malformed header");
  }
  ManifoldKind kind;
  if (kind_name == "euclidean") {
    kind = ManifoldKind::Euclidean;
  } else if (kind_name == "sphere") {
    kind = ManifoldKind::Sphere;
  } else if (kind_name == "spd") {
    kind = ManifoldKind::Spd;
  } else if (kind_name == "hyperboloid") {
    kind = ManifoldKind::Hyperboloid;
  } else {
    throw ConfigError("dataset: unknown manifold '" + kind_name + "'");
  }
  if (rows < 0 || cols < 0 || count < 0) throw ConfigError("dataset: negative sizes");
  std::vector<Point> points;
  points.reserve(count);
  for (long i = 0; i < count; ++i) {
    Matrix c(rows, cols);
    for (long r = 0; r < rows; ++r) {
      for (long j = 0; j < cols; ++j) {
        if (!(in >> c(r, j))) throw ConfigError("dataset: truncated data");
      }
    }
    points.push_back({kind, c});
  }
  return points;
}

}  // namespace riemann_accel
