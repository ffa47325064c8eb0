#include "ogf/geometric_program.hpp"

#include <algorithm>
#include <cmath>

namespace ogf {

Eigen::VectorXd gp_initial_point(const OgfProgram& p, const std::vector<OrientedEdge>& edges) {
  const ConvexProgram& cp = p.program;
  Eigen::VectorXd x = 0.5 * (cp.lower + cp.upper);
  for (const OrientedEdge& e : edges) {
    const Eigen::Index k = p.ratio_var[e.index];
    if (k < 0 || !e.active) continue;
    x[k] = std::min(0.5 * std::log(e.alpha_max), 0.1);
  }
  return x;
}

OgfSolution recover(const FlowModel& m, const OgfProgram& p, const ConvexSolution& s) {
  const Network& n = m.net();
  OgfSolution out;
  out.method = "gp";
  out.status = s.status;
  out.beta.resize(static_cast<Eigen::Index>(n.nodes.size()));
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    out.beta[static_cast<Eigen::Index>(i)] = std::exp(s.x[p.node_var(i)]);
  }
  out.alpha = ratios_from_pressures(out.beta, m.edges);
  out.cost = evaluate_cost(out.alpha, m.edges);

  Diagnostics& d = out.diagnostics;
  d.iterations = s.iterations;
  d.kkt_residual = s.kkt_residual();
  d.set("phase1_iterations", s.phase1_iterations);
  d.set("stationarity", s.stationarity);
  d.set("primal_infeasibility", s.primal_infeasibility);
  d.set("complementarity", s.complementarity);
  d.set("log_objective", s.objective);
  if (s.relaxation > 0.0) d.set("relaxation", s.relaxation);
  if (s.status == SolveStatus::kInfeasible) {
    d.message = "most violated constraint: " + s.most_violated;
    d.set("max_violation", s.max_violation);
  } else if (s.status == SolveStatus::kIterationLimit) {
    d.message = "iteration limit reached";
  }
  out.feasibility = check_feasibility(out, n, m.edges, true);
  return out;
}

GpResult solve_gp_full(const FlowModel& m, const InteriorPointOptions& options) {
  GpResult r;
  r.program = build_convex_ogf(m.net(), m.edges);
  r.log_solution = solve_convex(r.program.program, options, gp_initial_point(r.program, m.edges));
  r.solution = recover(m, r.program, r.log_solution);
  return r;
}

}  // namespace ogf
