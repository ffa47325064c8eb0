#include "ogf/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ogf/dynamic_program.hpp"
#include "ogf/geometric_program.hpp"
#include "ogf/greedy.hpp"
#include "ogf/instances.hpp"
#include "ogf/network_io.hpp"
#include "ogf/oracle.hpp"
#include "ogf/report.hpp"
#include "ogf/signomial.hpp"

namespace ogf {

namespace {

struct SolveFlags {
  std::string input;
  std::string output;
  double eps = 1e-3;
  double delta = 1e-6;
  int nbeta = 1000;
  int nalpha = 400;
  std::string root;
  double root_pressure_psi = -1.0;
  bool free_root = false;
  double tol = 1e-8;
  int alpha_points = 1001;
  bool decompression = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--input", f.input, "network JSON")->required();
  cmd->add_option("--output", f.output, "write output here instead of stdout");
  cmd->add_option("--eps", f.eps, "SP slack epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", f.delta, "SP convergence tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--nbeta", f.nbeta, "DP pressure bins");
  cmd->add_option("--nalpha", f.nalpha, "DP ratio bins");
  cmd->add_option("--root", f.root, "root node id");
  cmd->add_option("--root-pressure", f.root_pressure_psi, "root pressure in psi");
  cmd->add_flag("--free-root", f.free_root, "let the optimizer choose the root pressure");
  cmd->add_option("--tol", f.tol, "interior-point tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha-points", f.alpha_points, "oracle grid points per compressor");
  cmd->add_flag("--decompression", f.decompression, "oracle: allow throttling");
  cmd->add_option("--seed", f.seed, "random seed");
}

Network load(const SolveFlags& f) {
  Network n = load_network(f.input);
  if (!f.root.empty()) {
    const auto r = n.find_node(f.root);
    if (!r) throw InputError("--root", "unknown node " + f.root);
    n.root = *r;
  }
  if (f.root_pressure_psi >= 0.0) {
    n.root_policy = RootPolicy::kPinnedToValue;
    n.root_beta = std::pow(psi_to_pascal(f.root_pressure_psi), 2);
  }
  if (f.free_root) n.root_policy = RootPolicy::kFree;
  return n;
}

const std::vector<std::string> kMethods{"gp", "sp", "dp", "greedy", "oracle"};

OgfSolution run_method(const FlowModel& m, const std::string& method, const SolveFlags& f) {
  InteriorPointOptions ipm;
  ipm.tol = f.tol;
  if (method == "gp") return solve_gp(m, ipm);
  if (method == "sp") {
    SpConfig cfg;
    cfg.epsilon = f.eps;
    cfg.delta = f.delta;
    cfg.solver = ipm;
    return solve_signomial(m, cfg).solution;
  }
  if (method == "dp") {
    DpOptions o;
    o.n_beta = f.nbeta;
    o.n_alpha = f.nalpha;
    return solve_dp(m, o);
  }
  if (method == "greedy") return solve_greedy(m);
  if (method == "oracle") {
    OracleConfig cfg;
    cfg.alpha_points = f.alpha_points;
    cfg.allow_decompression = f.decompression;
    try {
      return brute_force(m, cfg);
    } catch (const OracleCapExceeded& e) {
      throw InputError("--alpha-points", e.what());
    }
  }
  throw InputError("--method", "unknown method " + method);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> split_ints(const std::string& s, const char* flag) {
  std::vector<int> out;
  for (const std::string& item : split(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(flag, "not an integer list: " + s);
    }
  }
  return out;
}

void check_method(const std::string& m) {
  if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
    throw InputError("--method", "unknown method " + m);
  }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path, "cannot write output file");
  f << text;
}

template <typename F>
double timed(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_solve(const std::string& method, const SolveFlags& f, std::ostream& out) {
  check_method(method);
  const Network n = load(f);
  const FlowModel m = make_flow_model(n);
  OgfSolution s;
  const double secs = timed([&] { s = run_method(m, method, f); });
  emit(report_string(m, s, secs), f.output, out);
  if (!f.output.empty()) out << method << " " << to_string(s.status) << " cost " << s.cost << "\n";
  return s.feasible() ? 0 : 2;
}

int cmd_compare(const std::string& methods, const SolveFlags& f, std::ostream& out) {
  const std::vector<std::string> list = split(methods);
  if (list.empty()) throw InputError("--methods", "no methods given");
  for (const std::string& name : list) check_method(name);
  const Network n = load(f);
  const FlowModel m = make_flow_model(n);
  std::vector<MethodRun> runs;
  double slack = 0.0;
  for (const std::string& name : list) {
    MethodRun r;
    r.method = name;
    r.seconds = timed([&] { r.solution = run_method(m, name, f); });
    if (name == "dp") slack = r.solution.diagnostics.get("disc_slack");
    runs.push_back(std::move(r));
  }
  const std::vector<std::string> violations = ordering_violations(runs, slack);
  emit(compare_table(runs, violations), f.output, out);
  for (const MethodRun& r : runs) {
    if (!r.solution.feasible()) return 2;
  }
  return 0;
}

int cmd_profile(const std::string& methods, const std::string& nbetas, const std::string& nalphas,
                bool pressure, const SolveFlags& f, std::ostream& out) {
  const Network n = load(f);
  const FlowModel m = make_flow_model(n);
  if (pressure) {
    std::vector<ProfileRow> rows;
    bool feasible = true;
    for (const std::string& name : split(methods)) {
      check_method(name);
      const OgfSolution s = run_method(m, name, f);
      feasible = feasible && s.feasible();
      const auto part = pressure_profile(n, s);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    emit(pressure_profile_csv(rows), f.output, out);
    return feasible ? 0 : 2;
  }
  const std::vector<int> bl = split_ints(nbetas, "--nbeta-list");
  const std::vector<int> al = split_ints(nalphas, "--nalpha-list");
  if (bl.empty() || al.empty()) throw InputError("--nbeta-list", "sweep needs --nbeta-list and --nalpha-list");
  InteriorPointOptions ipm;
  ipm.tol = f.tol;
  const OgfSolution ref = solve_gp(m, ipm);
  if (!ref.feasible()) throw InputError(f.input, "reference GP solve failed: " + ref.diagnostics.message);
  std::vector<SweepRow> rows;
  for (const int b : bl) {
    for (const int a : al) {
      DpOptions o;
      o.n_beta = b;
      o.n_alpha = a;
      OgfSolution s;
      SweepRow row;
      row.nbeta = b;
      row.nalpha = a;
      row.runtime_s = timed([&] { s = solve_dp(m, o); });
      row.frac_error = s.feasible() ? fractional_difference(s.cost, ref.cost) : INFINITY;
      rows.push_back(row);
    }
  }
  emit(sweep_csv(rows), f.output, out);
  return 0;
}

int cmd_generate(const std::string& topology, GeneratorSpec spec, const std::string& output, std::ostream& out) {
  if (topology == "path") {
    spec.topology = Topology::kPath;
  } else if (topology == "star") {
    spec.topology = Topology::kStar;
  } else if (topology == "tree") {
    spec.topology = Topology::kRandomTree;
  } else {
    throw InputError("--topology", "unknown topology " + topology);
  }
  emit(serialize_network(generate(spec)), output, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal gas flow on tree pipeline networks"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  std::string method;
  CLI::App* solve = app.add_subcommand("solve", "solve one network with one method");
  solve->add_option("--method", method, "gp|sp|dp|greedy|oracle")->required();
  add_common(solve, solve_flags);

  SolveFlags compare_flags;
  std::string methods = "gp,sp,dp,greedy";
  CLI::App* compare = app.add_subcommand("compare", "run several methods and compare costs");
  compare->add_option("--methods", methods, "comma separated list");
  add_common(compare, compare_flags);

  SolveFlags profile_flags;
  std::string profile_method = "dp";
  std::string nbeta_list, nalpha_list;
  bool pressure = false;
  CLI::App* profile = app.add_subcommand("profile", "pressure profile or DP grid sweep as CSV");
  profile->add_option("--method", profile_method, "method(s) for the pressure profile");
  profile->add_option("--nbeta-list", nbeta_list, "comma separated pressure bin counts");
  profile->add_option("--nalpha-list", nalpha_list, "comma separated ratio bin counts");
  profile->add_flag("--pressure-profile", pressure, "emit pressure versus milepost");
  add_common(profile, profile_flags);

  GeneratorSpec spec;
  std::string topology = "tree";
  std::string gen_output;
  CLI::App* gen = app.add_subcommand("generate", "write a synthetic network");
  gen->add_option("--topology", topology, "path|star|tree");
  gen->add_option("--nodes", spec.node_count);
  gen->add_option("--compressors", spec.compressor_count);
  gen->add_option("--branching", spec.max_branching);
  gen->add_option("--locality", spec.locality, "tree: attach to one of the last N open nodes (0 = any)");
  gen->add_option("--seed", spec.seed);
  gen->add_option("--segment-drop", spec.segment_drop);
  gen->add_option("--flow", spec.flow_scale, "kg/s supplied at the root");
  gen->add_option("--p-min", spec.p_min_psi, "psi");
  gen->add_option("--p-max", spec.p_max_psi, "psi");
  bool no_stubs = false;
  gen->add_flag("--no-stubs", no_stubs);
  gen->add_option("--output", gen_output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (*solve) return cmd_solve(method, solve_flags, out);
    if (*compare) return cmd_compare(methods, compare_flags, out);
    if (*profile) return cmd_profile(profile_method, nbeta_list, nalpha_list, pressure, profile_flags, out);
    if (*gen) {
      spec.stubs = !no_stubs;
      return cmd_generate(topology, spec, gen_output, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ogf
