// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ogf/cli.hpp"
#include "ogf/dynamic_program.hpp"
#include "ogf/geometric_program.hpp"
#include "ogf/greedy.hpp"
#include "ogf/instances.hpp"
#include "ogf/network_io.hpp"
#include "ogf/oracle.hpp"
#include "ogf/report.hpp"
#include "ogf/signomial.hpp"
#include "test_networks.hpp"

using namespace ogf;
using namespace ogf::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  const Clock::time_point t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const char* kFixtures[] = {"belgian_like.json", "transco_like.json"};

Verdict oracle_equivalence() {
  const Clock::time_point t0 = Clock::now();
  int bad = 0;
  double worst_sp = 0.0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const FlowModel m = make_flow_model(random_instance(seed));
    const OgfSolution gp = solve_gp(m);
    const OgfSolution sp = solve_signomial(m).solution;
    const OgfSolution dec = fine_oracle(m, true, 2000000);  // coarser: only checked against its grid slack
    const OgfSolution strict = fine_oracle(m, false);
    std::string why;
    if (!gp.feasible() || !sp.feasible() || !dec.feasible() || !strict.feasible()) {
      why = "a method failed";
    } else {
      const double slack = dec.diagnostics.get("grid_slack");
      if (gp.cost > dec.cost + 1e-4 * (1 + dec.cost)) why = "gp above oracle";
      if (gp.cost < dec.cost - slack - 1e-6 * (1 + dec.cost)) why = "gp below oracle minus grid slack";
      const double gap = std::abs(sp.cost - strict.cost);
      worst_sp = std::max(worst_sp, gap / std::max(strict.cost, 1e-9));
      if (gap > 1e-2 * strict.cost + 1e-8) why = "sp off the oracle by more than 1%";
    }
    if (!why.empty()) {
      if (bad++ == 0) first = "seed " + std::to_string(seed) + " " + why;
    }
  }
  const double t = seconds_since(t0);
  std::string d = std::to_string(bad) + " of 200 instances off; worst sp relative gap " + fmt("%.2e", worst_sp) +
                  "; " + fmt("%.1f s", t);
  if (bad) d += "; first: " + first;
  return {bad == 0 && t < 60.0, d};
}

std::vector<MethodRun> all_methods(const FlowModel& m, double& slack) {
  std::vector<MethodRun> runs;
  runs.push_back({"gp", solve_gp(m), 0.0});
  runs.push_back({"sp", solve_signomial(m).solution, 0.0});
  runs.push_back({"dp", solve_dp(m), 0.0});
  runs.push_back({"greedy", solve_greedy(m), 0.0});
  slack = runs[2].solution.diagnostics.get("disc_slack");
  return runs;
}

Verdict cost_ordering() {
  int checked = 0, violations = 0;
  std::string first;
  auto check = [&](const FlowModel& m, const std::string& label) {
    double slack = 0.0;
    const std::vector<MethodRun> runs = all_methods(m, slack);
    for (const MethodRun& r : runs) {
      if (!r.solution.feasible()) return;
    }
    ++checked;
    const std::vector<std::string> v = ordering_violations(runs, slack);
    if (!v.empty() && violations == 0) first = label + ": " + v.front();
    violations += static_cast<int>(v.size());
  };
  for (const char* name : kFixtures) check(make_flow_model(load_network(fixture_path(name))), name);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    check(make_flow_model(random_instance(seed)), "seed " + std::to_string(seed));
  }
  std::string d = std::to_string(violations) + " violations over " + std::to_string(checked) +
                  " instances where every method succeeded";
  if (violations) d += "; first: " + first;
  return {violations == 0 && checked >= 2, d};
}

Verdict sp_dp_agreement() {
  const Clock::time_point t0 = Clock::now();
  const FlowModel m = make_flow_model(load_network(fixture_path("transco_like.json")));
  const OgfSolution sp = solve_signomial(m).solution;
  DpOptions o;
  o.n_beta = 1000;
  o.n_alpha = 400;
  const OgfSolution dp = solve_dp(m, o);
  const double t = seconds_since(t0);
  if (!sp.feasible() || !dp.feasible()) return {false, "sp or dp failed"};
  const double gap = std::abs(sp.cost - dp.cost) / dp.cost;
  return {gap <= 1e-3 && t < 600.0, "sp " + fmt("%.6f", sp.cost) + " dp " + fmt("%.6f", dp.cost) +
                                        " relative gap " + fmt("%.2e", gap)};
}

Verdict greedy_excess() {
  const FlowModel m = make_flow_model(load_network(fixture_path("transco_like.json")));
  const OgfSolution sp = solve_signomial(m).solution;
  const OgfSolution g = solve_greedy(m);
  if (!sp.feasible() || !g.feasible()) return {false, "sp or greedy failed"};
  return {g.cost > sp.cost, "greedy " + fmt("%.4f", g.cost) + " sp " + fmt("%.4f", sp.cost) + " excess " +
                                fmt("%.1f%%", 100 * (g.cost / sp.cost - 1))};
}

Verdict dp_refinement() {
  const FlowModel m = make_flow_model(two_node());
  double prev = INFINITY;
  bool monotone = true;
  std::string d = "errors";
  for (int nb : {50, 100, 200, 400, 800, 1600}) {
    DpOptions o;
    o.n_beta = nb;
    o.n_alpha = 400;
    const OgfSolution s = solve_dp(m, o);
    if (!s.feasible()) return {false, "dp failed at nbeta " + std::to_string(nb)};
    const double err = std::abs(s.cost - two_node_optimum()) / two_node_optimum();
    monotone = monotone && err <= prev;
    prev = err;
    d += " " + fmt("%.2e", err);
  }
  return {monotone && prev <= 5e-3, d};
}

Eigen::VectorXd box_point(const ConvexProgram& p, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::VectorXd x(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) x[k] = p.lower[k] + (p.upper[k] - p.lower[k]) * u(gen);
  return x;
}

Verdict convexity_and_gradients() {
  std::mt19937_64 gen(2024);
  long long samples = 0, bad_convex = 0, gradients = 0, bad_grad = 0;
  double worst_grad = 0.0;
  for (const char* name : kFixtures) {
    const FlowModel m = make_flow_model(load_network(fixture_path(name)));
    const ConvexProgram p = build_convex_ogf(m.net(), m.edges).program;
    std::vector<const LogSumExp<double>*> fs{&p.objective};
    for (const auto& g : p.constraints) fs.push_back(&g);
    for (const LogSumExp<double>* f : fs) {
      for (int k = 0; k < 10000; ++k) {
        const Eigen::VectorXd x = box_point(p, gen), y = box_point(p, gen);
        ++samples;
        if (f->value(0.5 * (x + y)) > 0.5 * (f->value(x) + f->value(y)) + 1e-12) ++bad_convex;
      }
    }
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = box_point(p, gen);
      Eigen::Matrix<long double, Eigen::Dynamic, 1> xl = x.cast<long double>();
      for (const LogSumExp<double>* f : fs) {
        const LogSumExp<long double> fl = f->cast<long double>();
        const Eigen::VectorXd a = f->gradient(x);
        Eigen::VectorXd fd = Eigen::VectorXd::Zero(x.size());
        for (const Eigen::Index j : f->support()) {
          const long double h = 1e-6L * std::max(1.0L, std::abs(xl[j]));
          const long double keep = xl[j];
          xl[j] = keep + h;
          const long double up = fl.value(xl);
          xl[j] = keep - h;
          const long double down = fl.value(xl);
          xl[j] = keep;
          fd[j] = static_cast<double>((up - down) / (2 * h));
        }
        const double rel = (a - fd).norm() / std::max(1.0, a.norm());
        worst_grad = std::max(worst_grad, rel);
        ++gradients;
        if (rel > 1e-6) ++bad_grad;
      }
    }
  }
  return {bad_convex == 0 && bad_grad == 0,
          std::to_string(bad_convex) + " of " + std::to_string(samples) + " midpoint samples violated; " +
              std::to_string(bad_grad) + " of " + std::to_string(gradients) +
              " gradients off, worst relative " + fmt("%.2e", worst_grad)};
}

Verdict sp_descent() {
  std::string d;
  bool ok = true;
  for (const char* name : kFixtures) {
    const FlowModel m = make_flow_model(load_network(fixture_path(name)));
    const SpConfig cfg;
    const SpResult sp = solve_signomial(m, cfg);
    if (!sp.solution.feasible()) return {false, std::string(name) + ": sp failed"};
    double worst_rise = -INFINITY;
    for (std::size_t t = 1; t < sp.trace.iterations.size(); ++t) {
      worst_rise = std::max(worst_rise, sp.trace.iterations[t].cost - sp.trace.iterations[t - 1].cost);
    }
    double worst = -INFINITY;
    for (const OrientedEdge& e : m.edges) {
      worst = std::max(worst, no_decompression_constraint(e, static_cast<Eigen::Index>(e.tail),
                                                          static_cast<Eigen::Index>(e.head))
                                  .violation(sp.x));
    }
    ok = ok && worst_rise <= 10 * cfg.solver.tol && worst <= cfg.epsilon;
    if (!d.empty()) d += "; ";
    d += std::string(name) + " " + std::to_string(sp.trace.iterations.size()) + " iterations, largest rise " +
         fmt("%.1e", std::max(worst_rise, 0.0)) + ", log violation " + fmt("%.1e", worst);
  }
  return {ok, d};
}

Verdict zero_cost() {
  RandomInstanceOptions opt;
  opt.feasible_uncompressed = true;
  int bad = 0;
  double worst = 0.0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FlowModel m = make_flow_model(random_instance(seed, opt));
    double slack = 0.0;
    std::vector<MethodRun> runs = all_methods(m, slack);
    runs.push_back({"oracle", fine_oracle(m), 0.0});
    for (const MethodRun& r : runs) {
      const double c = r.solution.feasible() ? r.solution.cost : INFINITY;
      worst = std::max(worst, c);
      if (!(c <= 1e-8) && bad++ == 0) first = "seed " + std::to_string(seed) + " " + r.method;
    }
  }
  std::string d = std::to_string(bad) + " nonzero costs over 50 instances x 5 methods; largest " + fmt("%.1e", worst);
  if (bad) d += "; first: " + first;
  return {bad == 0, d};
}

std::string strip_wall_time(const std::string& s) {
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"wall_time_s\"") == std::string::npos && line.find("runtime") == std::string::npos) {
      out += line + "\n";
    }
  }
  return out;
}

std::string cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return std::to_string(code) + "\n" + out.str() + err.str();
}

Verdict determinism() {
  std::vector<std::vector<std::string>> runs;
  for (const char* name : kFixtures) {
    for (const char* method : {"gp", "sp", "dp", "greedy"}) {
      runs.push_back({"solve", "--method", method, "--input", fixture_path(name)});
    }
  }
  runs.push_back({"solve", "--method", "oracle", "--input", fixture_path("belgian_like.json")});
  runs.push_back({"generate", "--topology", "tree", "--nodes", "40", "--compressors", "8", "--seed", "11"});
  runs.push_back({"generate", "--topology", "path", "--nodes", "20", "--compressors", "2", "--seed", "7"});
  int differing = 0;
  std::string first;
  for (const auto& args : runs) {
    const std::string a = strip_wall_time(cli(args)), b = strip_wall_time(cli(args));
    if (a != b && differing++ == 0) first = args[0] + " " + args[2];
  }
  std::string d = std::to_string(differing) + " of " + std::to_string(runs.size()) + " repeated runs differ";
  if (differing) d += "; first: " + first;
  return {differing == 0, d};
}

}  // namespace

int main() {
  report(1, "oracle equivalence", oracle_equivalence);
  report(2, "cost ordering chain", cost_ordering);
  report(3, "sp/dp agreement on transco_like", sp_dp_agreement);
  report(4, "greedy excess on transco_like", greedy_excess);
  report(5, "dp refinement curve", dp_refinement);
  report(6, "convexity and gradient suites", convexity_and_gradients);
  report(7, "sp descent and bound-violation cap", sp_descent);
  report(8, "zero-cost detection", zero_cost);
  report(9, "determinism", determinism);
  return failures == 0 ? 0 : 1;
}
