#include "ogf/flow.hpp"

#include <cmath>
#include <limits>

namespace ogf {

FlowAssignment compute_flows(const Network& n) {
  const RootedTree tree = build_rooted_tree(n, n.root);
  // Injection sum of each node's subtree, accumulated children-first.
  std::vector<double> subtree(n.nodes.size(), 0.0);
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    const std::size_t v = *it;
    subtree[v] += n.nodes[v].injection;
    if (tree.parent[v] != RootedTree::kNone) subtree[tree.parent[v]] += subtree[v];
  }

  FlowAssignment f;
  f.flow = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n.edges.size()));
  for (std::size_t v = 0; v < n.nodes.size(); ++v) {
    const std::size_t k = tree.parent_edge[v];
    if (k == RootedTree::kNone) continue;
    // Removing edge k leaves v's subtree on one side; the flow out of that
    // side equals its net injection.
    const double out_of_child = subtree[v];
    f.flow[static_cast<Eigen::Index>(k)] = n.edges[k].from == v ? out_of_child : -out_of_child;
  }
  return f;
}

std::vector<OrientedEdge> canonicalize(const Network& n, const FlowAssignment& f) {
  return canonicalize(n, f, default_balance_tolerance(n));
}

std::vector<OrientedEdge> canonicalize(const Network& n, const FlowAssignment& f, double zero_tol) {
  std::vector<OrientedEdge> out;
  out.reserve(n.edges.size());
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    const Edge& e = n.edges[k];
    const double phi = f.flow[static_cast<Eigen::Index>(k)];
    OrientedEdge o;
    o.index = k;
    o.has_compressor = e.has_compressor();
    o.exponent = e.compressor ? e.compressor->exponent : Compressor{}.exponent;

    if (std::abs(phi) <= zero_tol) {
      o.tail = e.from;
      o.head = e.to;
      o.position = e.position();
      o.alpha_max = 1.0;
      out.push_back(o);
      continue;
    }

    o.reversed = phi < 0.0;
    o.tail = o.reversed ? e.to : e.from;
    o.head = o.reversed ? e.from : e.to;
    o.flow = std::abs(phi);
    o.position = e.has_compressor() ? (o.reversed ? 1.0 - e.position() : e.position()) : 0.0;
    const double drop = e.drop_constant * o.flow * o.flow;
    o.delta0 = o.position * drop;
    o.delta1 = drop - o.delta0;
    if (e.compressor) {
      o.d = e.compressor->cost_coeff * o.flow / e.compressor->efficiency;
      o.alpha_max = e.compressor->alpha_max;
      o.active = true;
    }
    out.push_back(o);
  }
  return out;
}

FlowModel make_flow_model(const Network& n) {
  const ValidationReport report = validate(n);
  if (!report.ok()) throw InputError("network", "network is not admissible: " + report.summary());
  FlowModel m;
  m.network = std::make_shared<const Network>(n);
  m.flows = compute_flows(n);
  m.edges = canonicalize(n, m.flows);
  return m;
}

double ratio_from_pressures(const OrientedEdge& e, double beta_tail, double beta_head) {
  const double inlet = beta_tail - e.delta0;
  if (!(inlet > 0.0)) return std::numeric_limits<double>::infinity();
  return (beta_head + e.delta1) / inlet;
}

}  // namespace ogf
