#include "ogf/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace ogf {

namespace {

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_json(const FlowModel& m, const OgfSolution& s, double wall_time_s) {
  const Network& n = m.net();
  nlohmann::ordered_json j;
  j["method"] = s.method;
  j["cost"] = number(s.cost);
  j["wall_time_s"] = wall_time_s;
  j["status"] = to_string(s.status);

  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const double b = s.beta[static_cast<Eigen::Index>(i)];
    nodes.push_back({{"id", n.nodes[i].id}, {"beta", number(b)}, {"p_psi", number(pascal_to_psi(std::sqrt(b)))}});
  }
  j["nodes"] = nodes;

  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    const double a = s.alpha[static_cast<Eigen::Index>(k)];
    const bool boosted = n.edges[k].has_compressor() && a > 1.0;
    edges.push_back({{"from", n.nodes[n.edges[k].from].id},
                     {"to", n.nodes[n.edges[k].to].id},
                     {"alpha", number(a)},
                     {"boosted", boosted}});
  }
  j["edges"] = edges;

  nlohmann::ordered_json d;
  d["iterations"] = s.diagnostics.iterations;
  d["kkt_residual"] = number(s.diagnostics.kkt_residual);
  d["message"] = s.diagnostics.message;
  for (const auto& [key, value] : s.diagnostics.values) d[key] = number(value);
  d["max_beta_violation"] = number(s.feasibility.max_beta_violation);
  d["max_alpha_violation"] = number(s.feasibility.max_alpha_violation);
  d["max_edge_residual"] = number(s.feasibility.max_edge_residual);
  d["worst_violation"] = s.feasibility.worst;
  j["diagnostics"] = d;
  return j;
}

std::string report_string(const FlowModel& m, const OgfSolution& s, double wall_time_s) {
  return report_json(m, s, wall_time_s).dump(2) + "\n";
}

std::vector<ProfileRow> pressure_profile(const Network& n, const OgfSolution& s) {
  std::vector<std::size_t> order(n.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    if (!n.nodes[i].milepost_km) {
      throw InputError("nodes[" + std::to_string(i) + "].milepost", "pressure profile needs a milepost on every node");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return *n.nodes[a].milepost_km < *n.nodes[b].milepost_km; });
  std::vector<ProfileRow> rows;
  for (const std::size_t i : order) {
    rows.push_back({*n.nodes[i].milepost_km, pascal_to_psi(std::sqrt(s.beta[static_cast<Eigen::Index>(i)])), s.method});
  }
  return rows;
}

std::string pressure_profile_csv(const std::vector<ProfileRow>& rows) {
  std::string out = "milepost_km,pressure_psi,method\n";
  for (const ProfileRow& r : rows) out += fixed(r.milepost_km, 3) + "," + fixed(r.pressure_psi, 6) + "," + r.method + "\n";
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "nbeta,nalpha,runtime_s,frac_error\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.nbeta) + "," + std::to_string(r.nalpha) + "," + fixed(r.runtime_s, 6) + "," +
           general(r.frac_error) + "\n";
  }
  return out;
}

double fractional_difference(double a, double b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

std::vector<std::string> ordering_violations(const std::vector<MethodRun>& runs, double disc_slack) {
  auto find = [&](const std::string& name) -> const OgfSolution* {
    for (const MethodRun& r : runs) {
      if (r.method == name && r.solution.feasible()) return &r.solution;
    }
    return nullptr;
  };
  std::vector<std::string> out;
  auto check = [&](const char* lo_name, const char* hi_name, double slack) {
    const OgfSolution* lo = find(lo_name);
    const OgfSolution* hi = find(hi_name);
    if (!lo || !hi) return;
    const double tol = 1e-6 * (1.0 + std::max(std::abs(lo->cost), std::abs(hi->cost)));
    if (lo->cost > hi->cost + slack + tol) {
      out.push_back(std::string(lo_name) + " cost " + general(lo->cost) + " exceeds " + hi_name + " cost " +
                    general(hi->cost) + (slack > 0.0 ? " + slack " + general(slack) : ""));
    }
  };
  check("gp", "sp", 0.0);
  check("sp", "dp", disc_slack);
  check("dp", "greedy", disc_slack);
  check("sp", "greedy", 0.0);
  return out;
}

std::string compare_table(const std::vector<MethodRun>& runs, const std::vector<std::string>& violations) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-16s %-16s %12s\n", "method", "status", "cost", "seconds");
  os << line;
  for (const MethodRun& r : runs) {
    std::snprintf(line, sizeof line, "%-8s %-16s %-16.10g %12.4f\n", r.method.c_str(), to_string(r.solution.status),
                  r.solution.cost, r.seconds);
    os << line;
  }
  os << "\nfractional differences |a-b|/max(b, 1e-9)\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (i == k) continue;
      std::snprintf(line, sizeof line, "%-8s vs %-8s %.3e\n", runs[i].method.c_str(), runs[k].method.c_str(),
                    fractional_difference(runs[i].solution.cost, runs[k].solution.cost));
      os << line;
    }
  }
  os << "\ncost ordering: " << (violations.empty() ? "ok" : "VIOLATED") << "\n";
  for (const std::string& v : violations) os << "  " << v << "\n";
  return os.str();
}

}  // namespace ogf
