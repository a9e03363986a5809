#include "riemann_accel/bench.hpp"

#include "riemann_accel/diagnostics.hpp"
#include "riemann_accel/errors.hpp"
#include "riemann_accel/geometry_constants.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace riemann_accel::bench {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

long parse_integer(const std::string& text, const std::string& key) {
  const double v = parse_number(text, key);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<long>(v);
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

FlowKind parse_flow_kind(const std::string& name) {
  if (name == "convex") return FlowKind::Convex;
  if (name == "strongly_convex") return FlowKind::StronglyConvex;
  throw ConfigError("unknown flow kind '" + name + "' (convex, strongly_convex)");
}

std::string to_string(FlowKind kind) {
  return kind == FlowKind::Convex ? "convex" : "strongly_convex";
}

// Calls fn(key, value) for every entry of a section, rejecting unknown keys.
template <typename Fn>
void for_each_key(const pt::ptree& section, const std::string& name,
                  const std::set<std::string>& allowed, Fn&& fn) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
    }
    fn(key, value.data());
  }
}

MethodSpec parse_method_section(const std::string& label, const pt::ptree& section) {
  MethodSpec spec;
  spec.label = label;
  bool has_method = false;
  for_each_key(section, "method." + label,
               {"method", "xi", "T", "step", "mu", "stop_grad_tol", "diameter_guard"},
               [&](const std::string& key, const std::string& value) {
                 if (key == "method") {
                   spec.method = parse_method(trim(value));
                   has_method = true;
                 } else if (key == "xi") {
                   spec.xi = trim(value);
                 } else if (key == "T") {
                   spec.T = parse_number(value, key);
                 } else if (key == "step") {
                   spec.step = trim(value);
                 } else if (key == "mu") {
                   spec.mu = trim(value);
                 } else if (key == "stop_grad_tol") {
                   spec.stop_grad_tol = parse_number(value, key);
                 } else if (key == "diameter_guard") {
                   spec.diameter_guard = parse_number(value, key);
                 }
               });
  if (!has_method) throw ConfigError("section [method." + label + "] has no 'method' key");
  return spec;
}

OdeSpec parse_ode_section(const pt::ptree& section) {
  OdeSpec ode;
  for_each_key(section, "ode",
               {"kinds", "s_ladder", "horizon", "xi", "mu", "T", "ref_step", "samples"},
               [&](const std::string& key, const std::string& value) {
                 if (key == "kinds") {
                   ode.kinds.clear();
                   for (const auto& k : split_list(value)) ode.kinds.push_back(parse_flow_kind(k));
                 } else if (key == "s_ladder") {
                   ode.s_ladder.clear();
                   for (const auto& s : split_list(value)) {
                     ode.s_ladder.push_back(parse_number(s, key));
                   }
                 } else if (key == "horizon") {
                   ode.horizon = parse_number(value, key);
                 } else if (key == "xi") {
                   ode.xi = parse_number(value, key);
                 } else if (key == "mu") {
                   ode.mu = parse_number(value, key);
                 } else if (key == "T") {
                   ode.T = parse_number(value, key);
                 } else if (key == "ref_step") {
                   ode.ref_step = parse_number(value, key);
                 } else if (key == "samples") {
                   ode.samples = static_cast<int>(parse_integer(value, key));
                 }
               });
  if (ode.kinds.empty()) throw ConfigError("[ode] kinds is empty");
  if (ode.s_ladder.empty()) throw ConfigError("[ode] s_ladder is empty");
  return ode;
}

double resolve_mu(const std::string& text, const Problem& problem, const std::string& label) {
  if (text == "problem") {
    if (!problem.mu) {
      throw ConfigError("method " + label + ": mu = problem, but " + problem.name +
                        " declares no strong convexity");
    }
    return *problem.mu;
  }
  return parse_number(text, "mu");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig config;
  bool has_problem = false;
  for (const auto& [name, section] : tree) {
    if (name == "experiment") {
      for_each_key(section, name,
                   {"name", "seed", "max_iters", "output_dir", "record_potential",
                    "record_distance"},
                   [&](const std::string& key, const std::string& value) {
                     if (key == "name") config.name = trim(value);
                     if (key == "seed") {
                       const long seed = parse_integer(value, key);
                       if (seed < 0) throw ConfigError("seed must be >= 0");
                       config.seed = static_cast<std::uint64_t>(seed);
                     }
                     if (key == "max_iters") config.max_iters = parse_integer(value, key);
                     if (key == "output_dir") config.output_dir = trim(value);
                     if (key == "record_potential") {
                       config.record_potential = parse_bool(value, key);
                     }
                     if (key == "record_distance") {
                       config.record_distance = parse_bool(value, key);
                     }
                   });
    } else if (name == "problem") {
      has_problem = true;
      for_each_key(section, name, {"kind", "dimension", "count", "condition", "L", "mu"},
                   [&](const std::string& key, const std::string& value) {
                     if (key == "kind") config.problem.kind = parse_dataset_kind(trim(value));
                     if (key == "dimension") {
                       config.problem.dimension = static_cast<int>(parse_integer(value, key));
                     }
                     if (key == "count") {
                       config.problem.count = static_cast<int>(parse_integer(value, key));
                     }
                     if (key == "condition") {
                       config.problem.condition = parse_number(value, key);
                     }
                     if (key == "L") config.L = parse_number(value, key);
                     if (key == "mu") config.mu = parse_number(value, key);
                   });
    } else if (name.rfind("method.", 0) == 0 && name.size() > 7) {
      config.methods.push_back(parse_method_section(name.substr(7), section));
    } else if (name == "ode") {
      config.ode = parse_ode_section(section);
    } else if (section.empty() && !section.data().empty()) {
      throw ConfigError("key '" + name + "' outside of a section");
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  if (!has_problem) throw ConfigError("missing [problem] section");
  if (config.max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (config.problem.dimension < 2) throw ConfigError("problem dimension must be >= 2");
  if (config.problem.count < 1) throw ConfigError("problem count must be >= 1");
  if (config.problem.condition < 1.0) throw ConfigError("problem condition must be >= 1");
  config.problem.seed = config.seed;
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in);
}

Problem build_problem(const ExperimentConfig& config) {
  return make_problem(config.problem, config.L, config.mu);
}

ResolvedMethod resolve_method(const MethodSpec& spec, const Problem& problem, long max_iters) {
  const DerivedConstants c = derive_constants(problem.bounds);
  ResolvedMethod out;
  OptimizerConfig& cfg = out.config;
  cfg.method = spec.method;
  cfg.max_iters = max_iters;
  cfg.stop_grad_tol = spec.stop_grad_tol;
  cfg.diameter_guard = spec.diameter_guard;
  cfg.xi = spec.xi == "theory" ? c.xi : parse_number(spec.xi, "xi");

  const bool convex = spec.method == Method::RnagC || spec.method == Method::NagCEuclidean;
  const bool strongly = spec.method == Method::RnagSc || spec.method == Method::NagScEuclidean;
  if (convex) cfg.T = spec.T.value_or(4.0 * cfg.xi);
  if (!spec.mu.empty()) cfg.mu = resolve_mu(spec.mu, problem, spec.label);
  if (strongly && !cfg.mu) throw ConfigError("method " + spec.label + " needs mu");

  if (spec.step == "1/L") {
    cfg.step_size = 1.0 / problem.L;
  } else if (spec.step == "theory") {
    if (strongly) {
      cfg.step_size = 1.0 / (9.0 * cfg.xi * problem.L);
    } else if (spec.method == Method::Rgd && cfg.mu) {
      cfg.step_size = std::min(1.0 / problem.L, 1.0 / (c.zeta * *cfg.mu));
    } else {
      cfg.step_size = 1.0 / problem.L;
    }
  } else {
    cfg.step_size = parse_number(spec.step, "step");
  }
  cfg.validate();
  out.heuristic = !problem.geodesically_convex || cfg.step_size > 1.0 / problem.L;
  if (convex) {
    const long horizon = std::max(max_iters, 1000L);
    out.heuristic = out.heuristic ||
                    !check_thm1_condition(cfg.xi, *cfg.T, c.zeta, c.delta, horizon).pass;
  } else if (strongly) {
    out.heuristic = out.heuristic ||
                    !check_thm2_condition(cfg.xi, *cfg.mu * cfg.step_size, c.zeta, c.delta).pass;
  } else if (cfg.mu) {
    out.heuristic = out.heuristic || cfg.step_size > 1.0 / (c.zeta * *cfg.mu);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace, bool record_distance) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.iter << ',' << format_double(r.wall_time_s) << ',' << format_double(r.f_gap)
        << ',' << format_double(r.grad_norm) << ',' << format_double(r.potential) << ','
        << (record_distance ? format_double(r.dist_to_opt) : "") << ',' << r.warnings
        << '\n';
  }
}

void write_check_csv(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << kCheckHeader << '\n';
  for (const CheckRow& r : rows) {
    out << r.suite << ',' << r.case_name << ',' << r.samples << ','
        << format_double(r.worst_slack) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

unsigned worker_count() {
  if (const char* env = std::getenv("RIEMANN_ACCEL_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  Problem problem;
  std::vector<ResolvedMethod> methods;
  try {
    config = load_config(config_path);
    if (config.methods.empty()) throw ConfigError("config defines no [method.*] section");
    problem = build_problem(config);
    for (const MethodSpec& spec : config.methods) {
      methods.push_back(resolve_method(spec, problem, config.max_iters));
    }
    std::filesystem::create_directories(config.output_dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const bool monitor = config.record_potential && problem.optimum.has_value();
  std::vector<PotentialRun> runs(methods.size());
  parallel_for(methods.size(), [&](std::size_t i) {
    if (monitor) {
      runs[i] = run_with_potential(problem, methods[i].config);
    } else {
      runs[i].trace = run(problem, methods[i].config);
    }
  });

  const std::string problem_name = to_string(config.problem.kind);
  bool faulted = false;
  try {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto path = config.output_dir / (problem_name + "-" + config.methods[i].label + "-" +
                                             std::to_string(config.seed) + ".csv");
      std::ofstream csv = open_output(path);
      write_trace_csv(csv, runs[i].trace, config.record_distance);
    }
    std::ofstream summary = open_output(config.output_dir / "summary.csv");
    summary << "problem,method,label,seed,iters,final_f_gap,final_grad_norm,gradient_calls,"
               "potential_monotone,fault\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const Trace& t = runs[i].trace;
      const TraceRecord& last = t.records.back();
      std::string monotone = "n/a";
      if (monitor) monotone = runs[i].check.monotonicity.pass ? "yes" : "no";
      summary << problem_name << ',' << config.methods[i].label << ','
              << (methods[i].heuristic ? "heuristic" : "theory") << ',' << config.seed << ','
              << last.iter << ',' << format_double(last.f_gap) << ','
              << format_double(last.grad_norm) << ',' << t.gradient_calls << ',' << monotone
              << ',' << (t.fault ? "yes" : "no") << '\n';
      out << config.methods[i].label << ": " << last.iter << " iterations, f_gap "
          << format_double(last.f_gap);
      if (methods[i].heuristic) out << " (heuristic: outside the potential guarantees)";
      if (monitor && !runs[i].check.monotonicity.pass) {
        out << " [potential increased at k=" << runs[i].check.monotonicity.first_violation
            << "]";
      }
      out << '\n';
      if (t.fault) {
        err << config.methods[i].label << ": iteration fault: " << *t.fault << '\n';
        faulted = true;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return faulted ? kExitFault : kExitOk;
}

int cmd_ode(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig config = load_config(config_path);
    if (!config.ode) throw ConfigError("config has no [ode] section");
    const OdeSpec& ode = *config.ode;
    const Problem problem = build_problem(config);
    std::filesystem::create_directories(config.output_dir);

    std::vector<DiscreteVsFlowConfig> cells;
    for (FlowKind kind : ode.kinds) {
      DiscreteVsFlowConfig cfg;
      cfg.kind = kind;
      cfg.s_ladder = ode.s_ladder;
      cfg.horizon = ode.horizon;
      cfg.params.xi = ode.xi;
      if (kind == FlowKind::StronglyConvex) {
        cfg.params.mu = ode.mu > 0.0 ? ode.mu : problem.mu.value_or(0.0);
      }
      cfg.T = ode.T.value_or(4.0 * ode.xi);
      const double s_min = *std::min_element(ode.s_ladder.begin(), ode.s_ladder.end());
      cfg.ref_step = ode.ref_step.value_or(std::sqrt(s_min) / 100.0);
      cfg.samples = ode.samples;
      cells.push_back(cfg);
    }
    std::vector<std::vector<DeviationRow>> tables(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) { tables[i] = discrete_vs_flow(problem, cells[i]); });

    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string kind = to_string(cells[i].kind);
      const auto path = config.output_dir / ("ode-" + to_string(config.problem.kind) + "-" + kind +
                                             "-" + std::to_string(config.seed) + ".csv");
      std::ofstream csv = open_output(path);
      csv << kOdeHeader << '\n';
      const auto& rows = tables[i];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        csv << format_double(rows[r].s) << ',' << format_double(rows[r].horizon) << ','
            << format_double(rows[r].max_deviation) << ','
            << format_double(rows[r].final_f_gap_discrete) << ','
            << format_double(rows[r].final_f_gap_flow) << '\n';
        out << kind << " s=" << format_double(rows[r].s)
            << " max_deviation=" << format_double(rows[r].max_deviation) << '\n';
        if (r > 0 && !(rows[r].max_deviation <= 1.1 * rows[r - 1].max_deviation)) {
          err << kind << ": deviation grew from s=" << format_double(rows[r - 1].s)
              << " to s=" << format_double(rows[r].s) << '\n';
          ok = false;
        }
      }
    }
    return ok ? kExitOk : kExitCheckFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IterationFault& e) {
    err << "iteration fault: " << e.what() << '\n';
    return kExitFault;
  } catch (const CutLocusError& e) {
    err << "iteration fault: " << e.what() << '\n';
    return kExitFault;
  }
}

int cmd_check(const std::string& suite, std::uint64_t seed, int samples,
              const std::optional<std::filesystem::path>& report_path, std::ostream& out,
              std::ostream& err) {
  std::vector<CheckRow> rows;
  try {
    if (samples < 1) throw ConfigError("samples must be >= 1");
    rows = run_check_suite(suite, seed, samples);
    if (report_path) {
      std::ofstream file = open_output(*report_path);
      write_check_csv(file, rows);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  write_check_csv(out, rows);
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_emit_config(const std::string& preset,
                    const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                    std::ostream& err) {
  std::string text;
  try {
    text = preset_config(preset);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (!out_path) {
    out << text;
    return kExitOk;
  }
  std::ofstream file(*out_path);
  if (!file) {
    err << "cannot write " << out_path->string() << '\n';
    return kExitConfig;
  }
  file << text;
  return kExitOk;
}

}  // namespace riemann_accel::bench
