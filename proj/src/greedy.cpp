#include "ogf/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogf {

namespace {

struct Sweep {
  const FlowModel& m;
  const RootedTree tree;
  std::vector<const OrientedEdge*> edges;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;

  Sweep(const FlowModel& model)
      : m(model), tree(build_rooted_tree(model.net(), model.net().root)), edges(model.edges.size()) {
    for (const OrientedEdge& e : m.edges) edges[e.index] = &e;
    alpha = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(edges.size()));
    beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tree.parent.size()));
  }

  double child_pressure(std::size_t k, double beta_parent, double a, bool forward) const {
    const OrientedEdge& e = *edges[k];
    return forward ? (beta_parent - e.delta0) * a - e.delta1 : (beta_parent + e.delta1) / a + e.delta0;
  }

  bool forward(std::size_t k, std::size_t parent) const { return edges[k]->tail == parent; }

  // Recomputes pressures below `from` (inclusive of its children).
  void propagate(std::size_t from) {
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const std::size_t k : tree.child_edges[v]) {
        const std::size_t c = RootedTree::other_end(m.net().edges[k], v);
        beta[static_cast<Eigen::Index>(c)] =
            child_pressure(k, beta[static_cast<Eigen::Index>(v)], alpha[static_cast<Eigen::Index>(k)], forward(k, v));
        stack.push_back(c);
      }
    }
  }

  bool throttleable(std::size_t k, std::size_t parent) const {
    const OrientedEdge& e = *edges[k];
    return e.has_compressor && e.active && forward(k, parent);
  }

  // Largest pressure at `top` keeping everything below it under beta_max,
  // with forward compressors below throttled to 1 and other ratios as they
  // are. Pressures below are increasing affine functions of beta_top.
  double ceiling(std::size_t top) const {
    const Network& n = m.net();
    double limit = n.nodes[top].beta_max;
    // (slope, offset) of each node's pressure as a function of beta_top.
    std::vector<std::tuple<std::size_t, double, double>> stack{{top, 1.0, 0.0}};
    while (!stack.empty()) {
      const auto [v, slope, offset] = stack.back();
      stack.pop_back();
      for (const std::size_t k : tree.child_edges[v]) {
        const std::size_t c = RootedTree::other_end(n.edges[k], v);
        const OrientedEdge& e = *edges[k];
        const double a = throttleable(k, v) ? 1.0 : alpha[static_cast<Eigen::Index>(k)];
        double s, o;
        if (forward(k, v)) {
          s = slope * a;
          o = (offset - e.delta0) * a - e.delta1;
        } else {
          s = slope / a;
          o = (offset + e.delta1) / a + e.delta0;
        }
        limit = std::min(limit, (n.nodes[c].beta_max - o) / s);
        stack.emplace_back(c, s, o);
      }
    }
    return limit;
  }

  // Sets the ratio of compressor edge k (tail = tree parent) as high as the
  // bounds downstream allow.
  void maximize(std::size_t k) {
    const OrientedEdge& e = *edges[k];
    const double inlet = beta[static_cast<Eigen::Index>(e.tail)] - e.delta0;
    if (!(inlet > 0.0)) return;
    const double target = ceiling(e.head);
    const double a = std::clamp((target + e.delta1) / inlet, 1.0, e.alpha_max);
    alpha[static_cast<Eigen::Index>(k)] = a;
    propagate(e.tail);
    throttle(e.head);
  }

  // Lowers forward compressors below `top` whose outlets would now exceed
  // what their subtree allows. Outlets never drop below their old values.
  void throttle(std::size_t top) {
    std::vector<std::size_t> stack{top};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const std::size_t k : tree.child_edges[v]) {
        const std::size_t c = RootedTree::other_end(m.net().edges[k], v);
        if (throttleable(k, v)) {
          const OrientedEdge& e = *edges[k];
          const double inlet = beta[static_cast<Eigen::Index>(v)] - e.delta0;
          double& a = alpha[static_cast<Eigen::Index>(k)];
          if (inlet > 0.0 && a > 1.0) {
            const double cap = std::max((ceiling(c) + e.delta1) / inlet, 1.0);
            if (cap < a) {
              a = cap;
              propagate(v);
            }
          }
        }
        stack.push_back(c);
      }
    }
  }

  bool low(std::size_t v) const {
    const Node& node = m.net().nodes[v];
    return beta[static_cast<Eigen::Index>(v)] < node.beta_min - 1e-12 * node.beta_max;
  }

  // Forward-flow active compressors from v up to the root, nearest first.
  std::vector<std::size_t> upstream(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = v; tree.parent[u] != RootedTree::kNone; u = tree.parent[u]) {
      const std::size_t k = tree.parent_edge[u];
      const OrientedEdge& e = *edges[k];
      if (e.active && e.alpha_max > 1.0 && e.tail == tree.parent[u]) out.push_back(k);
    }
    return out;
  }
};

}  // namespace

OgfSolution solve_greedy(const FlowModel& m, std::optional<double> root_beta) {
  const Network& n = m.net();
  Sweep sw(m);
  const std::size_t root = sw.tree.root;
  sw.beta[static_cast<Eigen::Index>(root)] = root_beta ? *root_beta : n.pinned_root_beta();
  sw.propagate(root);

  int boosts = 0;
  std::vector<std::string> unresolved;
  for (const std::size_t v : sw.tree.preorder) {
    if (!sw.low(v)) continue;
    const std::vector<std::size_t> chain = sw.upstream(v);
    // Back off one compressor at a time toward the root; after boosting a
    // further one, the nearer ones are re-maximized from their new inlet.
    for (std::size_t reach = 0; reach < chain.size() && sw.low(v); ++reach) {
      // nearer ones go back to 1 first so they do not cap the farther ceiling
      for (std::size_t j = 0; j < reach; ++j) sw.alpha[static_cast<Eigen::Index>(chain[j])] = 1.0;
      if (reach > 0) sw.propagate(sw.edges[chain[reach]]->tail);
      for (std::size_t j = reach + 1; j-- > 0;) {
        sw.maximize(chain[j]);
        ++boosts;
      }
    }
    if (sw.low(v)) unresolved.push_back(n.nodes[v].id);
  }

  OgfSolution s;
  s.method = "greedy";
  s.beta = sw.beta;
  s.alpha = sw.alpha;
  s.cost = evaluate_cost(s.alpha, m.edges);
  s.feasibility = check_feasibility(s, n, m.edges, false);
  s.diagnostics.set("boosts", boosts);
  double worst = 0.0;
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const Node& node = n.nodes[i];
    const double b = s.beta[static_cast<Eigen::Index>(i)];
    worst = std::max({worst, (node.beta_min - b) / node.beta_max, (b - node.beta_max) / node.beta_max});
  }
  if (worst > 1e-9) {
    s.status = SolveStatus::kInfeasible;
    s.diagnostics.message = unresolved.empty() ? "pressure bounds violated: " + s.feasibility.worst
                                               : "could not lift pressure at node " + unresolved.front() +
                                                     " (" + std::to_string(unresolved.size()) + " nodes)";
  }
  return s;
}

}  // namespace ogf
