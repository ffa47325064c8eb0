#include "ogf/convex_program.hpp"

#include <cmath>

namespace ogf {

LogSumExp<double> edge_constraint(const OrientedEdge& e, Eigen::Index tail_var,
                                  Eigen::Index head_var, Eigen::Index ratio_var) {
  using Term = LogSumExp<double>::Term;
  std::vector<Term> terms;
  if (ratio_var >= 0) {
    terms.push_back({1.0, {{head_var, 1.0}, {tail_var, -1.0}, {ratio_var, -1.0}}});
    terms.push_back({e.delta1, {{tail_var, -1.0}, {ratio_var, -1.0}}});
  } else {
    terms.push_back({1.0, {{head_var, 1.0}, {tail_var, -1.0}}});
    terms.push_back({e.delta1, {{tail_var, -1.0}}});
  }
  terms.push_back({e.delta0, {{tail_var, -1.0}}});
  return LogSumExp<double>::from_terms(terms);
}

OgfProgram build_convex_ogf(const Network& n, const std::vector<OrientedEdge>& edges) {
  OgfProgram out;
  ConvexProgram& p = out.program;

  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const Node& node = n.nodes[i];
    if (!(node.beta_min > 0.0)) {
      throw InputError("nodes[" + std::to_string(i) + "].p_min",
                       "lower pressure bound must be positive for the log-domain program");
    }
    double lo = std::log(node.beta_min), hi = std::log(node.beta_max);
    if (i == n.root && n.root_policy != RootPolicy::kFree) {
      lo = hi = std::log(n.pinned_root_beta());
    }
    p.add_variable("log_beta[" + node.id + "]", lo, hi);
  }

  out.ratio_var.assign(n.edges.size(), -1);
  for (const OrientedEdge& e : edges) {
    if (!e.has_compressor) continue;
    const std::string label = n.nodes[e.tail].id + "->" + n.nodes[e.head].id;
    const double hi = e.active ? std::log(e.alpha_max) : 0.0;
    out.ratio_var[e.index] = p.add_variable("log_ratio[" + label + "]", 0.0, hi);
  }

  using Term = LogSumExp<double>::Term;
  std::vector<Term> cost_terms;
  for (const OrientedEdge& e : edges) {
    if (e.active && e.d > 0.0) cost_terms.push_back({e.d, {{out.ratio_var[e.index], e.exponent}}});
  }
  p.objective = LogSumExp<double>::from_terms(cost_terms);

  out.edge_constraint.assign(n.edges.size(), -1);
  for (const OrientedEdge& e : edges) {
    out.edge_constraint[e.index] = static_cast<Eigen::Index>(p.constraints.size());
    p.add_constraint(edge_constraint(e, out.node_var(e.tail), out.node_var(e.head), out.ratio_var[e.index]),
                     "pressure balance " + n.nodes[e.tail].id + "->" + n.nodes[e.head].id);
  }
  return out;
}

}  // namespace ogf
