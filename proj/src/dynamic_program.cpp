#include "ogf/dynamic_program.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace ogf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd uniform_bins(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double h = (hi - lo) / (n - 1);
  for (int k = 0; k < n; ++k) v[k] = lo + k * h;
  v[n - 1] = hi;
  return v;
}

std::vector<const OrientedEdge*> index_edges(const FlowModel& m) {
  std::vector<const OrientedEdge*> out(m.edges.size());
  for (const OrientedEdge& e : m.edges) out[e.index] = &e;
  return out;
}

// Per-edge, per-ratio-bin cost d (alpha^m - 1).
std::vector<std::vector<double>> ratio_costs(const FlowModel& m, const DpGrid& grid) {
  std::vector<std::vector<double>> out(m.edges.size());
  for (const OrientedEdge& e : m.edges) {
    const Eigen::VectorXd& a = grid.alpha[e.index];
    out[e.index].resize(static_cast<std::size_t>(a.size()));
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      out[e.index][static_cast<std::size_t>(k)] = e.d > 0.0 ? e.d * (std::pow(a[k], e.exponent) - 1.0) : 0.0;
    }
  }
  return out;
}

struct Bellman {
  const FlowModel& m;
  const DpGrid& grid;
  const RootedTree& tree;
  const std::vector<const OrientedEdge*>& edges;
  const std::vector<std::vector<double>>& cost;
  const std::vector<std::vector<double>>& J;
  long long evaluations = 0;

  // Best (cost, ratio bin) for one child edge at parent pressure beta.
  std::pair<double, int> child_best(std::size_t parent, std::size_t k, double beta) {
    const OrientedEdge& e = *edges[k];
    const std::size_t child = RootedTree::other_end(m.net().edges[k], parent);
    const bool forward = e.tail == parent;
    const Eigen::VectorXd& a = grid.alpha[k];
    double best = kInf;
    int arg = -1;
    for (Eigen::Index s = 0; s < a.size(); ++s) {
      ++evaluations;
      const int bin = grid.bin_of(child, implied_pressure(beta, a[s], e, forward));
      if (bin < 0) continue;
      const double v = cost[k][static_cast<std::size_t>(s)] + J[child][static_cast<std::size_t>(bin)];
      if (v < best) {
        best = v;
        arg = static_cast<int>(s);
      }
    }
    return {best, arg};
  }

  double separable(std::size_t node, double beta, std::vector<int>* picks) {
    double total = 0.0;
    for (const std::size_t k : tree.child_edges[node]) {
      const auto [v, arg] = child_best(node, k, beta);
      if (picks) picks->push_back(arg);
      if (arg < 0) return kInf;
      total += v;
    }
    return total;
  }

  double joint(std::size_t node, double beta, std::vector<int>* picks) {
    const auto& kids = tree.child_edges[node];
    const std::size_t c = kids.size();
    // Child-bin lookups per (child, ratio bin); -1 marks infeasible.
    std::vector<std::vector<double>> term(c);
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t k = kids[j];
      const OrientedEdge& e = *edges[k];
      const std::size_t child = RootedTree::other_end(m.net().edges[k], node);
      const Eigen::VectorXd& a = grid.alpha[k];
      term[j].resize(static_cast<std::size_t>(a.size()));
      for (Eigen::Index s = 0; s < a.size(); ++s) {
        const int bin = grid.bin_of(child, implied_pressure(beta, a[s], e, e.tail == node));
        term[j][static_cast<std::size_t>(s)] =
            bin < 0 ? kInf : cost[k][static_cast<std::size_t>(s)] + J[child][static_cast<std::size_t>(bin)];
      }
    }
    if (c == 0) return 0.0;
    std::vector<std::size_t> idx(c, 0), best_idx(c, 0);
    double best = kInf;
    bool found = false;
    for (bool done = false; !done;) {
      ++evaluations;
      double total = 0.0;
      for (std::size_t j = 0; j < c; ++j) total += term[j][idx[j]];
      if (total < best) {
        best = total;
        best_idx = idx;
        found = true;
      }
      done = true;
      for (std::size_t j = c; j-- > 0;) {
        if (++idx[j] < term[j].size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
    }
    if (picks) {
      for (std::size_t j = 0; j < c; ++j) picks->push_back(found ? static_cast<int>(best_idx[j]) : -1);
    }
    return found ? best : kInf;
  }
};

}  // namespace

DpGrid DpGrid::uniform(const FlowModel& m, int n_beta, int n_alpha) {
  if (n_beta < 2) throw InputError("", "nbeta must be ≥ 2");
  if (n_alpha < 1) throw InputError("", "nalpha must be ≥ 1");
  const Network& n = m.net();
  DpGrid g;
  for (const Node& node : n.nodes) g.beta.push_back(uniform_bins(node.beta_min, node.beta_max, n_beta));
  g.alpha.resize(n.edges.size());
  for (const OrientedEdge& e : m.edges) {
    g.alpha[e.index] = e.active && e.alpha_max > 1.0 ? uniform_bins(1.0, e.alpha_max, n_alpha)
                                                     : Eigen::VectorXd::Ones(1);
  }
  return g;
}

double DpGrid::beta_step(std::size_t node) const {
  const Eigen::VectorXd& b = beta[node];
  return b.size() < 2 ? 0.0 : (b[b.size() - 1] - b[0]) / static_cast<double>(b.size() - 1);
}

double DpGrid::alpha_step(std::size_t edge) const {
  const Eigen::VectorXd& a = alpha[edge];
  return a.size() < 2 ? 0.0 : (a[a.size() - 1] - a[0]) / static_cast<double>(a.size() - 1);
}

int DpGrid::bin_of(std::size_t node, double value) const {
  if (!(value >= 0.0)) return -1;
  const Eigen::VectorXd& b = beta[node];
  const double lo = b[0], hi = b[b.size() - 1];
  const double h = beta_step(node);
  if (h == 0.0) return std::abs(value - lo) <= 1e-12 * std::max(1.0, lo) ? 0 : -1;
  if (value < lo - 0.5 * h || value > hi + 0.5 * h) return -1;
  const long k = std::lround((value - lo) / h);
  return static_cast<int>(std::clamp<long>(k, 0, b.size() - 1));
}

double implied_pressure(double beta_parent, double alpha, const OrientedEdge& e, bool parent_is_tail) {
  if (parent_is_tail) return (beta_parent - e.delta0) * alpha - e.delta1;
  return (beta_parent + e.delta1) / alpha + e.delta0;
}

CostToGo build_cost_to_go(const FlowModel& m, const DpGrid& grid, BellmanMode mode) {
  const auto start = std::chrono::steady_clock::now();
  const Network& n = m.net();
  CostToGo ctg;
  ctg.tree = build_rooted_tree(n, n.root);
  ctg.J.resize(n.nodes.size());
  ctg.choice.assign(n.edges.size(), {});
  const auto edges = index_edges(m);
  const auto cost = ratio_costs(m, grid);
  Bellman bell{m, grid, ctg.tree, edges, cost, ctg.J};

  std::vector<int> picks;
  for (auto it = ctg.tree.preorder.rbegin(); it != ctg.tree.preorder.rend(); ++it) {
    const std::size_t v = *it;
    const auto& kids = ctg.tree.child_edges[v];
    if (mode == BellmanMode::kJoint && kids.size() > 3) {
      throw InputError("nodes[" + std::to_string(v) + "]",
                       "joint Bellman mode supports at most 3 children, node " + n.nodes[v].id + " has " +
                           std::to_string(kids.size()));
    }
    const Eigen::VectorXd& bins = grid.beta[v];
    for (const std::size_t k : kids) ctg.choice[k].assign(static_cast<std::size_t>(bins.size()), -1);
    ctg.J[v].assign(static_cast<std::size_t>(bins.size()), kInf);
    for (Eigen::Index b = 0; b < bins.size(); ++b) {
      picks.clear();
      const double val = mode == BellmanMode::kJoint ? bell.joint(v, bins[b], &picks)
                                                     : bell.separable(v, bins[b], &picks);
      ctg.J[v][static_cast<std::size_t>(b)] = val;
      if (val == kInf) continue;
      for (std::size_t j = 0; j < kids.size(); ++j) ctg.choice[kids[j]][static_cast<std::size_t>(b)] = picks[j];
    }
  }
  ctg.stats.evaluations = bell.evaluations;
  ctg.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ctg;
}

OgfSolution traceback(const FlowModel& m, const CostToGo& ctg, const DpGrid& grid,
                      std::optional<double> root_beta) {
  const Network& n = m.net();
  const RootedTree& tree = ctg.tree;
  const std::size_t root = tree.root;
  const auto edges = index_edges(m);
  const auto cost = ratio_costs(m, grid);

  OgfSolution s;
  s.method = "dp";
  s.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n.nodes.size()));
  s.alpha = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n.edges.size()));

  std::vector<int> root_picks;
  double j_root = kInf;
  double beta0 = 0.0;
  if (root_beta) {
    beta0 = *root_beta;
    Bellman bell{m, grid, tree, edges, cost, ctg.J};
    j_root = bell.separable(root, beta0, &root_picks);
  } else {
    const auto& jr = ctg.J[root];
    const auto best = std::min_element(jr.begin(), jr.end());
    const std::size_t b = static_cast<std::size_t>(best - jr.begin());
    beta0 = grid.beta[root][static_cast<Eigen::Index>(b)];
    j_root = *best;
    for (const std::size_t k : tree.child_edges[root]) root_picks.push_back(ctg.choice[k][b]);
  }

  if (j_root == kInf) {
    s.status = SolveStatus::kInfeasible;
    for (std::size_t i = 0; i < n.nodes.size(); ++i) s.beta[static_cast<Eigen::Index>(i)] = n.nodes[i].beta_min;
    s.beta[static_cast<Eigen::Index>(root)] = beta0;
    const auto& jr = ctg.J[root];
    int nearest = -1;
    for (std::size_t b = 0; b < jr.size(); ++b) {
      if (jr[b] == kInf) continue;
      const double dist = std::abs(grid.beta[root][static_cast<Eigen::Index>(b)] - beta0);
      if (nearest < 0 || dist < std::abs(grid.beta[root][nearest] - beta0)) nearest = static_cast<int>(b);
    }
    std::ostringstream msg;
    msg << "infeasible at root pressure " << pascal_to_psi(std::sqrt(beta0)) << " psi";
    if (nearest >= 0) {
      msg << "; nearest feasible root bin " << nearest << " (" << pascal_to_psi(std::sqrt(grid.beta[root][nearest]))
          << " psi)";
    } else {
      msg << "; no feasible root bin at this discretization";
    }
    s.diagnostics.message = msg.str();
    s.feasibility = check_feasibility(s, n, m.edges, false);
    return s;
  }

  // Parent before child; bins of every non-root node.
  std::vector<int> bin(n.nodes.size(), -1);
  std::vector<int> picked(n.edges.size(), 0);
  s.beta[static_cast<Eigen::Index>(root)] = beta0;
  for (const std::size_t v : tree.preorder) {
    const double bv = s.beta[static_cast<Eigen::Index>(v)];
    const auto& kids = tree.child_edges[v];
    for (std::size_t j = 0; j < kids.size(); ++j) {
      const std::size_t k = kids[j];
      const int a = v == root ? root_picks[j] : ctg.choice[k][static_cast<std::size_t>(bin[v])];
      const OrientedEdge& e = *edges[k];
      const std::size_t child = RootedTree::other_end(n.edges[k], v);
      const double alpha = grid.alpha[k][a];
      bin[child] = grid.bin_of(child, implied_pressure(bv, alpha, e, e.tail == v));
      s.beta[static_cast<Eigen::Index>(child)] = grid.beta[child][bin[child]];
      s.alpha[static_cast<Eigen::Index>(k)] = alpha;
      picked[k] = a;
    }
  }

  // Same summation order as the tables: children in order, leaves upward.
  std::vector<double> acc(n.nodes.size(), 0.0);
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    const std::size_t v = *it;
    double total = 0.0;
    for (const std::size_t k : tree.child_edges[v]) {
      const std::size_t child = RootedTree::other_end(n.edges[k], v);
      total += cost[k][static_cast<std::size_t>(picked[k])] + acc[child];
    }
    acc[v] = total;
  }
  s.cost = acc[root];
  s.status = SolveStatus::kOptimal;
  s.diagnostics.set("j_root", j_root);
  s.feasibility = check_feasibility(s, n, m.edges, false);
  return s;
}

double discretization_slack(const FlowModel& m, const DpGrid& grid) {
  const Network& n = m.net();
  const RootedTree tree = build_rooted_tree(n, n.root);
  std::vector<double> half(n.nodes.size(), 0.0);
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    if (i != tree.root) half[i] = 0.5 * grid.beta_step(i);
  }
  // Half-bin sums along root paths and over subtrees.
  std::vector<double> path(n.nodes.size(), 0.0), below(n.nodes.size(), 0.0);
  for (const std::size_t v : tree.preorder) {
    if (tree.parent[v] != RootedTree::kNone) path[v] = path[tree.parent[v]] + half[v];
  }
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    const std::size_t v = *it;
    below[v] += half[v];
    if (tree.parent[v] != RootedTree::kNone) below[tree.parent[v]] += below[v];
  }
  double slack = 0.0;
  for (const OrientedEdge& e : m.edges) {
    if (!e.active || !(e.d > 0.0)) continue;
    const std::size_t child = tree.parent[e.head] == e.tail ? e.head : e.tail;
    const std::size_t parent = child == e.head ? e.tail : e.head;
    const double h = path[parent] + below[child];
    const double inlet = std::max(n.nodes[e.tail].beta_min - e.delta0, 1e-12 * n.nodes[e.tail].beta_max);
    slack += e.d * e.exponent * (grid.alpha_step(e.index) + e.alpha_max * h / inlet);
  }
  return slack;
}

OgfSolution solve_dp(const FlowModel& m, const DpOptions& options) {
  const DpGrid grid = DpGrid::uniform(m, options.n_beta, options.n_alpha);
  const CostToGo ctg = build_cost_to_go(m, grid, options.mode);
  const Network& n = m.net();
  std::optional<double> root;
  if (n.root_policy != RootPolicy::kFree) root = n.pinned_root_beta();
  OgfSolution s = traceback(m, ctg, grid, root);
  Diagnostics& d = s.diagnostics;
  d.set("n_beta", options.n_beta);
  d.set("n_alpha", options.n_alpha);
  d.set("evaluations", static_cast<double>(ctg.stats.evaluations));
  d.set("disc_slack", discretization_slack(m, grid));
  return s;
}

}  // namespace ogf
