#include "riemann_accel/bench.hpp"
#include "riemann_accel/errors.hpp"
#include "riemann_accel/geometry_constants.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace riemann_accel;
using namespace riemann_accel::bench;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("riemann_bench_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string replace_line(std::string text, const std::string& key, const std::string& value) {
  const std::string prefix = key + " = ";
  const auto at = text.find("\n" + prefix);
  if (at == std::string::npos) return text;
  const auto end = text.find('\n', at + 1);
  return text.substr(0, at + 1) + prefix + value + text.substr(end);
}

// Writes a preset with its output directory moved under `dir`.
fs::path write_preset(const TempDir& dir, const std::string& preset, long max_iters,
                      const std::string& tag = "out") {
  std::string text = preset_config(preset);
  text = replace_line(text, "output_dir", (dir.path() / tag).string());
  text = replace_line(text, "max_iters", std::to_string(max_iters));
  const fs::path path = dir.path() / (preset + "-" + tag + ".ini");
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Drops the wall_time_s column.
std::string without_time(const std::string& line) {
  const auto a = line.find(',');
  const auto b = line.find(',', a + 1);
  return line.substr(0, a) + line.substr(b);
}

long first_hit(const fs::path& csv, double eps) {
  const auto lines = read_lines(csv);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string iter, time, gap;
    std::getline(ss, iter, ',');
    std::getline(ss, time, ',');
    std::getline(ss, gap, ',');
    if (std::stod(gap) <= eps) return std::stol(iter);
  }
  return -1;
}

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(Config, EveryPresetParses) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 6u);
  for (const auto& name : names) {
    const ExperimentConfig c = parse_text(preset_config(name));
    EXPECT_EQ(c.name, name);
    if (name == "ode-appendix-f3") {
      ASSERT_TRUE(c.ode.has_value());
      EXPECT_EQ(c.ode->s_ladder, (std::vector<double>{1e-2, 1e-3, 1e-4}));
      EXPECT_DOUBLE_EQ(c.ode->xi, 2.0);
    } else {
      EXPECT_FALSE(c.methods.empty()) << name;
    }
  }
}

TEST(Config, PresetContents) {
  const ExperimentConfig full_scale = parse_text(preset_config("rayleigh-paper"));
  EXPECT_EQ(full_scale.problem.kind, DatasetKind::Rayleigh);
  EXPECT_EQ(full_scale.problem.dimension, 1000);
  ASSERT_GE(full_scale.methods.size(), 2u);
  EXPECT_EQ(full_scale.methods[1].method, Method::RnagC);
  EXPECT_EQ(full_scale.methods[1].xi, "1");
  EXPECT_EQ(full_scale.methods[1].step, "1/L");

  const ExperimentConfig spd = parse_text(preset_config("karcher-spd-desk"));
  EXPECT_EQ(spd.problem.kind, DatasetKind::KarcherSpd);
  EXPECT_EQ(spd.problem.dimension, 10);
  EXPECT_EQ(spd.problem.count, 10);
  EXPECT_DOUBLE_EQ(spd.L, 10.0);
  std::vector<Method> methods;
  for (const auto& m : spd.methods) methods.push_back(m.method);
  EXPECT_NE(std::find(methods.begin(), methods.end(), Method::Rgd), methods.end());
  EXPECT_NE(std::find(methods.begin(), methods.end(), Method::RnagC), methods.end());
  EXPECT_NE(std::find(methods.begin(), methods.end(), Method::RnagSc), methods.end());

  const ExperimentConfig flat = parse_text(preset_config("euclid-oracle"));
  const Problem p = build_problem(flat);
  const DerivedConstants c = derive_constants(p.bounds);
  EXPECT_EQ(c.xi, 1.0);
  for (const auto& m : flat.methods) {
    EXPECT_FALSE(resolve_method(m, p, 10).heuristic) << m.label;
  }
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_text("[experiment]\nseed = 1\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\nkind = rayleigh\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\nkind = torus\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\ndimension = ten\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\ndimension = 1\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\n[method.a]\nxi = 2\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\n[method.a]\nmethod = adam\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\n[extra]\n"), ConfigError);
  EXPECT_THROW(parse_text("[problem]\n[ode]\nkinds = convex\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(ResolveMethod, SymbolicValues) {
  const Problem p = make_karcher(ManifoldKind::Spd, 3, 4, 10.0, 1);
  const DerivedConstants c = derive_constants(p.bounds);

  MethodSpec sc;
  sc.label = "sc";
  sc.method = Method::RnagSc;
  sc.xi = "theory";
  sc.step = "theory";
  sc.mu = "problem";
  const ResolvedMethod r = resolve_method(sc, p, 50);
  EXPECT_DOUBLE_EQ(r.config.xi, c.xi);
  EXPECT_DOUBLE_EQ(r.config.step_size, 1.0 / (9.0 * c.xi * p.L));
  EXPECT_DOUBLE_EQ(*r.config.mu, 1.0);
  EXPECT_FALSE(r.heuristic);

  sc.xi = "1";
  sc.step = "1/L";
  EXPECT_TRUE(resolve_method(sc, p, 50).heuristic);

  MethodSpec convex;
  convex.label = "c";
  convex.method = Method::RnagC;
  convex.xi = "theory";
  const ResolvedMethod rc = resolve_method(convex, p, 50);
  EXPECT_DOUBLE_EQ(*rc.config.T, 4.0 * c.xi);
  EXPECT_DOUBLE_EQ(rc.config.step_size, 1.0 / p.L);
  EXPECT_FALSE(rc.heuristic);

  MethodSpec rgd;
  rgd.label = "g";
  rgd.method = Method::Rgd;
  rgd.step = "theory";
  rgd.mu = "problem";
  EXPECT_DOUBLE_EQ(resolve_method(rgd, p, 50).config.step_size,
                   std::min(1.0 / p.L, 1.0 / c.zeta));

  MethodSpec missing_mu;
  missing_mu.label = "m";
  missing_mu.method = Method::RnagSc;
  EXPECT_THROW(resolve_method(missing_mu, p, 50), ConfigError);
  missing_mu.mu = "problem";
  EXPECT_THROW(resolve_method(missing_mu, make_rayleigh(5, 1), 50), ConfigError);
}

TEST(ResolveMethod, RayleighIsAlwaysHeuristic) {
  const Problem p = make_rayleigh(6, 2);
  MethodSpec spec;
  spec.label = "rgd";
  EXPECT_TRUE(resolve_method(spec, p, 10).heuristic);
}

TEST(Csv, FormatAndHeader) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  Trace t;
  TraceRecord r;
  r.iter = 3;
  r.f_gap = 0.5;
  r.dist_to_opt = 2.0;
  r.warnings = "diameter|fault";
  t.records.push_back(r);
  std::ostringstream with, without;
  write_trace_csv(with, t, true);
  write_trace_csv(without, t, false);
  EXPECT_EQ(with.str(), std::string(kTraceHeader) + "\n3,0,0.5,0,0,2,diameter|fault\n");
  EXPECT_EQ(without.str(), std::string(kTraceHeader) + "\n3,0,0.5,0,0,,diameter|fault\n");
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  EXPECT_THROW(parallel_for(10,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(ParallelFor, WorkerCountFromEnvironment) {
  ::setenv("RIEMANN_ACCEL_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  ::setenv("RIEMANN_ACCEL_THREADS", "zero", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("RIEMANN_ACCEL_THREADS");
}

TEST(CmdRun, ZeroBudgetWritesSingleRow) {
  TempDir dir;
  std::ostringstream out, err;
  const fs::path config = write_preset(dir, "euclid-oracle", 0);
  ASSERT_EQ(cmd_run(config, out, err), kExitOk) << err.str();
  const auto lines = read_lines(dir.path() / "out" / "euclidean_quadratic-rnag_c-0.csv");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], kTraceHeader);
  EXPECT_EQ(lines[1].substr(0, 2), "0,");
  const auto summary = read_lines(dir.path() / "out" / "summary.csv");
  EXPECT_EQ(summary.size(), 6u);
}

TEST(CmdRun, DeterministicAcrossRunsAndThreadCounts) {
  TempDir dir;
  std::ostringstream out, err;
  ::setenv("RIEMANN_ACCEL_THREADS", "1", 1);
  ASSERT_EQ(cmd_run(write_preset(dir, "karcher-hyp-desk", 40, "serial"), out, err), kExitOk);
  ::setenv("RIEMANN_ACCEL_THREADS", "4", 1);
  ASSERT_EQ(cmd_run(write_preset(dir, "karcher-hyp-desk", 40, "parallel"), out, err), kExitOk);
  ::unsetenv("RIEMANN_ACCEL_THREADS");
  for (const auto& entry : fs::directory_iterator(dir.path() / "serial")) {
    const auto a = read_lines(entry.path());
    const auto b = read_lines(dir.path() / "parallel" / entry.path().filename());
    ASSERT_EQ(a.size(), b.size()) << entry.path();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (entry.path().filename() == "summary.csv") {
        EXPECT_EQ(a[i], b[i]);
      } else {
        EXPECT_EQ(without_time(a[i]), without_time(b[i])) << entry.path() << " line " << i;
      }
    }
  }
}

TEST(CmdRun, ConfigErrorsExitThree) {
  TempDir dir;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(dir.path() / "missing.ini", out, err), kExitConfig);
  EXPECT_NE(err.str().find("config error"), std::string::npos);
  const fs::path bad = dir.path() / "bad.ini";
  std::ofstream(bad) << "[problem]\nkind = rayleigh\ndimension = 5\n";
  EXPECT_EQ(cmd_run(bad, out, err), kExitConfig);
}

TEST(CmdRun, KarcherSpdAcceleratedMethodReachesToleranceFirst) {
  TempDir dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(write_preset(dir, "karcher-spd-desk", 200), out, err), kExitOk);
  const long rgd = first_hit(dir.path() / "out" / "karcher_spd-rgd-0.csv", 1e-8);
  const long fast = first_hit(dir.path() / "out" / "karcher_spd-rnag_sc-0.csv", 1e-8);
  ASSERT_GT(rgd, 0);
  ASSERT_GT(fast, 0);
  EXPECT_LT(fast, rgd);
}

TEST(CmdRun, RayleighAcceleratedMethodReachesToleranceFirst) {
  TempDir dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(write_preset(dir, "rayleigh-desk", 500), out, err), kExitOk);
  const long rgd = first_hit(dir.path() / "out" / "rayleigh-rgd-0.csv", 1e-6);
  const long fast = first_hit(dir.path() / "out" / "rayleigh-rnag_c-0.csv", 1e-6);
  ASSERT_GT(rgd, 0);
  ASSERT_GT(fast, 0);
  EXPECT_LT(fast, rgd);
}

TEST(CmdOde, LadderDeviationShrinks) {
  TempDir dir;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_ode(write_preset(dir, "ode-appendix-f3", 0), out, err), kExitOk) << err.str();
  for (const char* kind : {"convex", "strongly_convex"}) {
    const auto lines =
        read_lines(dir.path() / "out" / (std::string("ode-rayleigh-") + kind + "-0.csv"));
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], kOdeHeader);
    double prev = INFINITY;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      std::stringstream ss(lines[i]);
      std::string s, horizon, dev;
      std::getline(ss, s, ',');
      std::getline(ss, horizon, ',');
      std::getline(ss, dev, ',');
      EXPECT_LT(std::stod(dev), prev);
      prev = std::stod(dev);
    }
  }
}

TEST(CmdOde, RefusesDegenerateReference) {
  TempDir dir;
  const fs::path config = dir.path() / "degenerate.ini";
  std::ofstream(config) << "[experiment]\noutput_dir = " << (dir.path() / "out").string()
                        << "\n[problem]\nkind = euclidean_quadratic\ndimension = 3\n"
                        << "[ode]\ns_ladder = 1e-2\nref_step = 0.1\n";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_ode(config, out, err), kExitConfig);
  const fs::path no_ode = dir.path() / "no_ode.ini";
  std::ofstream(no_ode) << "[problem]\nkind = rayleigh\n";
  EXPECT_EQ(cmd_ode(no_ode, out, err), kExitConfig);
}

TEST(CmdCheck, EuclideanLemmaSlacksVanish) {
  const auto rows = run_check_suite("lemmas", 3, 200);
  int euclidean = 0;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass) << r.case_name;
    if (r.case_name.find("euclidean") != std::string::npos) {
      ++euclidean;
      EXPECT_NEAR(r.worst_slack, 0.0, 1e-12);
    }
  }
  EXPECT_EQ(euclidean, 2);
}

TEST(CmdCheck, ReportAndExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_check("conditions", 0, 10, std::nullopt, out, err), kExitOk);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kCheckHeader);
  EXPECT_EQ(cmd_check("everything", 0, 10, std::nullopt, out, err), kExitConfig);
  EXPECT_EQ(cmd_check("manifolds", 0, 0, std::nullopt, out, err), kExitConfig);
}

TEST(CmdCheck, PotentialSuitePasses) {
  for (const auto& r : run_check_suite("potentials", 0, 1)) {
    EXPECT_TRUE(r.pass) << r.case_name << " slack " << r.worst_slack;
  }
}

TEST(CmdEmitConfig, WritesFileAndRejectsUnknown) {
  TempDir dir;
  std::ostringstream out, err;
  const fs::path path = dir.path() / "preset.ini";
  EXPECT_EQ(cmd_emit_config("rayleigh-desk", path, out, err), kExitOk);
  EXPECT_EQ(load_config(path).problem.dimension, 50);
  EXPECT_EQ(cmd_emit_config("rayleigh-huge", std::nullopt, out, err), kExitConfig);
  EXPECT_NE(err.str().find("karcher-spd-desk"), std::string::npos);
}
