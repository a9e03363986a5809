#include "riemann_accel/bench.hpp"

#include "riemann_accel/errors.hpp"

#include <map>

namespace riemann_accel::bench {

namespace {

const char* const kRayleighMethods = R"([method.rgd]
method = rgd
step = 1/L

; Experimental setting: xi = 1, T = 4, s = 1/L. On the sphere this is below
; zeta, so runs are labelled heuristic.
[method.rnag_c]
method = rnag_c
xi = 1
T = 4
step = 1/L

; xi = zeta + 3 (zeta - delta) from the declared bounds. With D close to pi
; this xi is in the thousands and the method moves very slowly.
[method.rnag_c_theory]
method = rnag_c
xi = theory
step = theory
)";

const char* const kKarcherMethods = R"([method.rgd]
method = rgd
step = 1/L
mu = problem

[method.rnag_c]
method = rnag_c
xi = 1
T = 4
step = 1/L

[method.rnag_sc]
method = rnag_sc
xi = 1
step = 1/L
mu = problem

; Theory-faithful parameters: xi from the bounds, s = 1/(9 xi L).
[method.rnag_sc_theory]
method = rnag_sc
xi = theory
step = theory
mu = problem
)";

std::string experiment(const std::string& name, long iters) {
  return "[experiment]\nname = " + name + "\nseed = 0\nmax_iters = " + std::to_string(iters) +
         "\noutput_dir = out/" + name + "\nrecord_potential = true\nrecord_distance = true\n\n";
}

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = {
      {"rayleigh-paper",
       "; Leading eigenvector of A = (B + B^T)/2, B_ij ~ N(0, 1/d), at d = 1000.\n" +
           experiment("rayleigh-paper", 2000) +
           "[problem]\nkind = rayleigh\ndimension = 1000\n\n" + kRayleighMethods},
      {"rayleigh-desk",
       "; Rayleigh quotient on the sphere at desk scale.\n" + experiment("rayleigh-desk", 2000) +
           "[problem]\nkind = rayleigh\ndimension = 50\n\n" + kRayleighMethods},
      {"karcher-spd-desk",
       "; Karcher mean of 10 SPD matrices of size 10, condition number 100.\n"
       "; L = 10 is the assumed smoothness constant, mu = 1.\n" +
           experiment("karcher-spd-desk", 500) +
           "[problem]\nkind = karcher_spd\ndimension = 10\ncount = 10\ncondition = 100\n"
           "L = 10\n\n" +
           kKarcherMethods},
      {"karcher-hyp-desk",
       "; Karcher mean of 10 points on H^50 (hyperboloid model), L = 10, mu = 1.\n" +
           experiment("karcher-hyp-desk", 500) +
           "[problem]\nkind = karcher_hyperbolic\ndimension = 50\ncount = 10\nL = 10\n\n" +
           kKarcherMethods},
      {"euclid-oracle",
       "; Diagonal quadratic with spectrum in [mu, L]; flat bounds, so xi = 1 is exact.\n" +
           experiment("euclid-oracle", 500) +
           "[problem]\nkind = euclidean_quadratic\ndimension = 20\nL = 1\nmu = 0.01\n\n"
           "[method.rgd]\nmethod = rgd\nstep = 1/L\n\n"
           "[method.rnag_c]\nmethod = rnag_c\nxi = 1\nT = 4\nstep = 1/L\n\n"
           "[method.rnag_sc]\nmethod = rnag_sc\nxi = 1\nstep = 1/L\nmu = problem\n\n"
           "[method.nag_c]\nmethod = nag_c_euclidean\nxi = 1\nT = 4\nstep = 1/L\n\n"
           "[method.nag_sc]\nmethod = nag_sc_euclidean\nxi = 1\nstep = 1/L\nmu = problem\n"},
      {"ode-appendix-f3",
       "; Discrete iterates against the limiting ODE on the Rayleigh problem, d = 10.\n"
       "; Times are matched as t = sqrt(s) (k + 1); the flow starts at t0 = sqrt(s).\n" +
           experiment("ode-appendix-f3", 0) +
           "[problem]\nkind = rayleigh\ndimension = 10\n\n"
           "[ode]\nkinds = convex, strongly_convex\ns_ladder = 1e-2, 1e-3, 1e-4\n"
           "horizon = 5\nxi = 2\n; mu is only used by the strongly convex friction.\n"
           "mu = 0.1\nsamples = 100\n"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : presets()) names.push_back(name);
  return names;
}

std::string preset_config(const std::string& name) {
  const auto& table = presets();
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [n, text] : table) known += "\n  " + n;
    throw ConfigError("unknown preset '" + name + "'; known presets:" + known);
  }
  return it->second;
}

}  // namespace riemann_accel::bench
