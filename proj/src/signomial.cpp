#include "ogf/signomial.hpp"

#include "ogf/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogf {

NoDecompressionConstraint no_decompression_constraint(const OrientedEdge& e, Eigen::Index tail_var,
                                                      Eigen::Index head_var) {
  return {tail_var, head_var, e.delta()};
}

LinearizedConstraint linearize(const NoDecompressionConstraint& c, double bj_current, double epsilon) {
  LinearizedConstraint l;
  l.tail_var = c.tail_var;
  l.head_var = c.head_var;
  const double ebj = std::exp(bj_current);
  l.slope = ebj / (ebj + c.delta);
  l.intercept = c.rhs(bj_current) - l.slope * bj_current + epsilon;
  return l;
}

LogSumExp<double> LinearizedConstraint::as_function() const {
  return LogSumExp<double>::affine({{tail_var, 1.0}, {head_var, -slope}}, -intercept);
}

namespace {

double trace_cost(const ConvexProgram& p, const Eigen::VectorXd& x) {
  if (p.objective.empty()) return 0.0;
  double total = 0.0, base = 0.0;
  const auto& a = p.objective.exponents();
  const auto& b = p.objective.log_coeffs();
  const Eigen::VectorXd xs = p.objective.local(x);
  for (Eigen::Index k = 0; k < p.objective.terms(); ++k) {
    total += std::exp(b[k] + a.row(k).dot(xs));
    base += std::exp(b[k]);
  }
  return total - base;
}

}  // namespace

bool snap_ratios(const FlowModel& m, OgfSolution& s) {
  const Network& n = m.net();
  const RootedTree tree = build_rooted_tree(n, n.root);
  std::vector<const OrientedEdge*> by_index(n.edges.size());
  for (const OrientedEdge& e : m.edges) by_index[e.index] = &e;
  const auto ix = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  const Eigen::VectorXd beta0 = s.beta, alpha0 = s.alpha;

  // Either keep each child's pressure where possible, or keep each ratio
  // (clamped to [1, alpha_max]) and let pressures follow.
  auto attempt = [&](bool keep_ratio, Eigen::VectorXd& beta, Eigen::VectorXd& alpha) {
    beta = beta0;
    alpha = Eigen::VectorXd::Ones(alpha0.size());
    for (const std::size_t v : tree.preorder) {
      const std::size_t k = tree.parent_edge[v];
      if (k == RootedTree::kNone) continue;
      const OrientedEdge& e = *by_index[k];
      const double amax = e.active ? e.alpha_max : 1.0;
      const double want = keep_ratio ? std::clamp(alpha0[ix(k)], 1.0, amax) : 1.0;
      if (e.tail == tree.parent[v]) {
        const double inlet = beta[ix(e.tail)] - e.delta0;
        const double lo = inlet - e.delta1, hi = inlet * amax - e.delta1;
        beta[ix(v)] = keep_ratio ? inlet * want - e.delta1 : std::clamp(beta0[ix(v)], lo, std::max(lo, hi));
      } else {
        const double outlet = beta[ix(e.head)] + e.delta1;
        const double lo = outlet / amax + e.delta0, hi = outlet + e.delta0;
        beta[ix(v)] = keep_ratio ? outlet / want + e.delta0 : std::clamp(beta0[ix(v)], lo, std::max(lo, hi));
      }
      const double a = ratio_from_pressures(e, beta[ix(e.tail)], beta[ix(e.head)]);
      alpha[ix(k)] = std::clamp(a, 1.0, amax);
    }
    for (std::size_t i = 0; i < n.nodes.size(); ++i) {
      const double b = beta[ix(i)];
      const double slack = 1e-12 * n.nodes[i].beta_max;
      if (!(b >= n.nodes[i].beta_min - slack && b <= n.nodes[i].beta_max + slack)) return false;
    }
    return true;
  };

  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd beta, alpha;
  for (const bool keep_ratio : {false, true}) {
    if (!attempt(keep_ratio, beta, alpha)) continue;
    const double cost = evaluate_cost(alpha, m.edges);
    if (cost < best) {
      found = true;
      best = cost;
      s.beta = beta;
      s.alpha = alpha;
      s.cost = cost;
    }
  }
  return found;
}

SpResult solve_signomial(const FlowModel& m, const SpConfig& cfg, const Eigen::VectorXd& start) {
  const Network& n = m.net();
  const OgfProgram base = build_convex_ogf(n, m.edges);

  std::vector<NoDecompressionConstraint> nd;
  std::vector<std::string> nd_names;
  for (const OrientedEdge& e : m.edges) {
    if (!cfg.decompression_allowed.empty() && cfg.decompression_allowed[e.index]) continue;
    nd.push_back(no_decompression_constraint(e, base.node_var(e.tail), base.node_var(e.head)));
    nd_names.push_back("no decompression " + n.nodes[e.tail].id + "->" + n.nodes[e.head].id);
  }

  SpResult r;
  Eigen::VectorXd x = start;
  ConvexSolution last;
  SolveStatus status = SolveStatus::kIterationLimit;
  std::string message;
  int solver_iterations = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    ConvexProgram p = base.program;
    for (std::size_t c = 0; c < nd.size(); ++c) {
      p.add_constraint(linearize(nd[c], x[nd[c].head_var], cfg.epsilon).as_function(), nd_names[c]);
    }
    last = solve_convex(p, cfg.solver, x);
    solver_iterations += last.iterations + last.phase1_iterations;
    SpIteration step;
    step.status = last.status;
    step.solver_iterations = last.iterations + last.phase1_iterations;
    if (last.status == SolveStatus::kInfeasible) {
      r.trace.iterations.push_back(step);
      status = SolveStatus::kInfeasible;
      message = "inner program infeasible at iteration " + std::to_string(it) +
                "; most violated constraint: " + last.most_violated;
      break;
    }
    step.step_norm = (last.x - x).norm();
    step.cost = trace_cost(p, last.x);
    r.trace.iterations.push_back(step);
    x = last.x;
    if (step.step_norm <= cfg.delta) {
      status = last.status == SolveStatus::kOptimal ? SolveStatus::kOptimal : last.status;
      break;
    }
  }

  OgfSolution s;
  s.method = "sp";
  s.status = status;
  s.beta.resize(static_cast<Eigen::Index>(n.nodes.size()));
  for (std::size_t i = 0; i < n.nodes.size(); ++i) s.beta[static_cast<Eigen::Index>(i)] = std::exp(x[base.node_var(i)]);
  s.alpha = ratios_from_pressures(s.beta, m.edges);
  s.cost = evaluate_cost(s.alpha, m.edges);
  r.raw_cost = s.cost;
  r.snapped_cost = s.cost;
  if (status != SolveStatus::kInfeasible && cfg.snap) {
    OgfSolution snapped = s;
    if (snap_ratios(m, snapped)) {
      r.snapped = true;
      r.snapped_cost = snapped.cost;
      s = std::move(snapped);
    }
  }

  double worst = 0.0;
  for (const NoDecompressionConstraint& c : nd) worst = std::max(worst, c.violation(x));
  Diagnostics& d = s.diagnostics;
  d.iterations = static_cast<int>(r.trace.iterations.size());
  d.kkt_residual = last.kkt_residual();
  d.message = message;
  d.set("solver_iterations", solver_iterations);
  d.set("epsilon", cfg.epsilon);
  d.set("delta", cfg.delta);
  d.set("raw_cost", r.raw_cost);
  d.set("snapped_cost", r.snapped_cost);
  d.set("snapped", r.snapped ? 1.0 : 0.0);
  d.set("max_log_decompression", worst);
  if (!r.trace.iterations.empty()) d.set("final_step_norm", r.trace.iterations.back().step_norm);
  if (status == SolveStatus::kIterationLimit && message.empty()) d.message = "iteration limit reached";
  s.feasibility = check_feasibility(s, n, m.edges, false);
  r.solution = std::move(s);
  r.x = std::move(x);
  return r;
}

namespace {

Eigen::VectorXd log_point(const FlowModel& m, const OgfProgram& p, const OgfSolution& s) {
  Eigen::VectorXd x(p.program.size());
  for (std::size_t i = 0; i < m.net().nodes.size(); ++i) x[p.node_var(i)] = std::log(s.beta[static_cast<Eigen::Index>(i)]);
  for (const OrientedEdge& e : m.edges) {
    const Eigen::Index k = p.ratio_var[e.index];
    if (k >= 0) x[k] = std::log(std::max(s.alpha[static_cast<Eigen::Index>(e.index)], 1.0));
  }
  return x;
}

}  // namespace

SpResult solve_signomial(const FlowModel& m, const SpConfig& cfg) {
  const GpResult gp = solve_gp_full(m, cfg.solver);
  if (gp.log_solution.status == SolveStatus::kInfeasible) {
    SpResult r;
    r.solution = gp.solution;
    r.solution.method = "sp";
    r.solution.diagnostics.message = "starting program infeasible; " + gp.solution.diagnostics.message;
    return r;
  }
  SpResult r = solve_signomial(m, cfg, gp.log_solution.x);
  if (r.solution.status != SolveStatus::kInfeasible) {
    r.solution.diagnostics.set("restarted", 0.0);
    return r;
  }
  // The linearized constraints are an inner approximation, so a start that
  // decompresses far from alpha >= 1 can leave the first subproblem empty.
  // Restart from a point without decompression: the repaired GP solution,
  // else the greedy one.
  OgfSolution start = gp.solution;
  double restart = 1.0;
  if (!snap_ratios(m, start)) {
    start = solve_greedy(m);
    restart = 2.0;
    if (!start.feasible()) return r;
  }
  SpResult again = solve_signomial(m, cfg, log_point(m, gp.program, start));
  again.solution.diagnostics.set("restarted", restart);
  return again;
}

}  // namespace ogf
