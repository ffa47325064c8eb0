#include "ogf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ogf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
  std::vector<std::size_t> order;                       // parents first
  std::vector<std::size_t> up_edge;                     // edge to parent
  std::vector<std::size_t> up_node;
  std::vector<std::vector<std::size_t>> down;           // child edges
};

Layout layout(const Network& n) {
  Layout l;
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> adj(n.nodes.size());
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    adj[n.edges[k].from].push_back(k);
    adj[n.edges[k].to].push_back(k);
  }
  l.up_edge.assign(n.nodes.size(), none);
  l.up_node.assign(n.nodes.size(), none);
  l.down.resize(n.nodes.size());
  std::vector<bool> seen(n.nodes.size(), false);
  std::deque<std::size_t> queue{n.root};
  seen[n.root] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    l.order.push_back(v);
    for (const std::size_t k : adj[v]) {
      const std::size_t w = n.edges[k].from == v ? n.edges[k].to : n.edges[k].from;
      if (seen[w]) continue;
      seen[w] = true;
      l.up_edge[w] = k;
      l.up_node[w] = v;
      l.down[v].push_back(k);
      queue.push_back(w);
    }
  }
  return l;
}

}  // namespace

OgfSolution brute_force(const FlowModel& m, const OracleConfig& cfg) {
  const Network& n = m.net();
  const Layout lay = layout(n);
  const std::size_t nv = n.nodes.size();
  std::vector<const OrientedEdge*> oe(n.edges.size());
  for (const OrientedEdge& e : m.edges) oe[e.index] = &e;
  auto child_of = [&](std::size_t k) {
    const std::size_t a = n.edges[k].from, b = n.edges[k].to;
    return lay.up_edge[a] == k ? a : b;
  };

  // Subtree facts per node: any boostable compressor below, all edges outward.
  std::vector<bool> has_comp(nv, false), outward(nv, true);
  std::vector<double> lo_req(nv, -kInf);  // max over subtree of beta_min_w + drop(v -> w)
  // Without a boostable compressor below v, every subtree pressure is beta_v
  // plus a constant; [lo_v, hi_v] is the window of beta_v the subtree admits.
  std::vector<double> lo(nv, -kInf), hi(nv, kInf);
  for (auto it = lay.order.rbegin(); it != lay.order.rend(); ++it) {
    const std::size_t v = *it;
    lo_req[v] = std::max(lo_req[v], n.nodes[v].beta_min);
    lo[v] = n.nodes[v].beta_min;
    hi[v] = n.nodes[v].beta_max;
    for (const std::size_t k : lay.down[v]) {
      const std::size_t c = child_of(k);
      const OrientedEdge& e = *oe[k];
      has_comp[v] = has_comp[v] || has_comp[c] || (e.active && e.alpha_max > 1.0);
      outward[v] = outward[v] && outward[c] && e.tail == v;
      lo_req[v] = std::max(lo_req[v], lo_req[c] + e.delta0 + e.delta1);
      const double shift = e.tail == v ? e.delta0 + e.delta1 : -(e.delta0 + e.delta1);  // beta_v - beta_c
      lo[v] = std::max(lo[v], lo[c] + shift);
      hi[v] = std::min(hi[v], hi[c] + shift);
    }
  }

  enum class Kind { kFixed, kGrid, kExact };
  std::vector<Kind> kind(n.edges.size(), Kind::kFixed);
  std::vector<std::size_t> gridded;
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    const OrientedEdge& e = *oe[k];
    if (!e.active || !(e.alpha_max > 1.0)) continue;
    const std::size_t c = child_of(k);
    const bool exact = cfg.allow_decompression ? e.tail == lay.up_node[c] && !has_comp[c] && outward[c]
                                               : !has_comp[c];
    if (exact) {
      kind[k] = Kind::kExact;
    } else {
      kind[k] = Kind::kGrid;
      gridded.push_back(k);
    }
  }

  std::vector<double> roots = cfg.root_betas;
  if (roots.empty()) {
    if (n.root_policy == RootPolicy::kFree) {
      const Node& r = n.nodes[n.root];
      const int pts = std::max(cfg.root_points, 1);
      for (int i = 0; i < pts; ++i) {
        roots.push_back(pts == 1 ? r.beta_max : r.beta_min + (r.beta_max - r.beta_min) * i / (pts - 1));
      }
    } else {
      roots.push_back(n.pinned_root_beta());
    }
  }

  const long long per_edge = std::max(cfg.alpha_points, 2);
  long long total = static_cast<long long>(roots.size());
  for (std::size_t i = 0; i < gridded.size(); ++i) {
    if (total > cfg.max_points / per_edge + 1) {
      total = cfg.max_points + 1;
      break;
    }
    total *= per_edge;
  }
  if (total > cfg.max_points) {
    long double need = static_cast<long double>(roots.size()) * std::pow(static_cast<long double>(per_edge), gridded.size());
    throw OracleCapExceeded(static_cast<long long>(std::min<long double>(need, 9.0e18L)), cfg.max_points);
  }

  auto grid_value = [&](std::size_t k, long long i) {
    const double top = oe[k]->alpha_max;
    return i == per_edge - 1 ? top : 1.0 + (top - 1.0) * static_cast<double>(i) / static_cast<double>(per_edge - 1);
  };

  // Flow order for the throttling check: tails before heads.
  std::vector<std::size_t> flow_order;
  if (cfg.allow_decompression) {
    std::vector<int> indeg(nv, 0);
    std::vector<std::vector<std::size_t>> out(nv);
    for (const OrientedEdge& e : m.edges) {
      ++indeg[e.head];
      out[e.tail].push_back(e.index);
    }
    std::deque<std::size_t> ready;
    for (std::size_t v = 0; v < nv; ++v) {
      if (indeg[v] == 0) ready.push_back(v);
    }
    while (!ready.empty()) {
      const std::size_t v = ready.front();
      ready.pop_front();
      for (const std::size_t k : out[v]) {
        flow_order.push_back(k);
        if (--indeg[oe[k]->head] == 0) ready.push_back(oe[k]->head);
      }
    }
  }

  Eigen::VectorXd beta(static_cast<Eigen::Index>(nv));
  Eigen::VectorXd ratio(static_cast<Eigen::Index>(n.edges.size()));
  Eigen::VectorXd best_beta, best_ratio;
  double best_cost = kInf;
  std::vector<long long> idx(gridded.size(), 0);
  std::vector<double> grid_ratio(n.edges.size(), 1.0);
  const double rel = 1e-9;

  // Smallest ratio putting the compressor-free subtree below edge k inside
  // its window, given the pressure at the parent end. Cost grows with the
  // ratio, so this is optimal whenever any ratio is.
  auto exact_ratio = [&](std::size_t k, double beta_parent) {
    const OrientedEdge& e = *oe[k];
    const std::size_t c = child_of(k);
    double a = 1.0;
    if (cfg.allow_decompression) {
      const double inlet = beta_parent - e.delta0;
      if (!(inlet > 0.0)) return kInf;
      a = (lo_req[c] + e.delta1) / inlet;
    } else if (e.tail != c) {
      const double inlet = beta_parent - e.delta0;
      if (!(inlet > 0.0)) return kInf;
      a = (lo[c] + e.delta1) / inlet;
    } else {
      // beta_c = (beta_parent + delta1) / a + delta0 must not exceed hi_c
      const double room = hi[c] - e.delta0;
      if (!(room > 0.0)) return kInf;
      a = (beta_parent + e.delta1) / room;
    }
    a = std::max(1.0, a);
    return a <= e.alpha_max * (1.0 + 1e-12) ? std::min(a, e.alpha_max) : kInf;
  };

  auto in_bounds = [&](std::size_t v) {
    const Node& node = n.nodes[v];
    const double b = beta[static_cast<Eigen::Index>(v)];
    const double tol = rel * node.beta_max;
    return b >= node.beta_min - tol && b <= node.beta_max + tol;
  };

  for (const double beta0 : roots) {
    std::fill(idx.begin(), idx.end(), 0);
    for (bool done = false; !done;) {
      for (std::size_t g = 0; g < gridded.size(); ++g) grid_ratio[gridded[g]] = grid_value(gridded[g], idx[g]);

      bool ok = true;
      double cost = 0.0;
      if (!cfg.allow_decompression) {
        beta[static_cast<Eigen::Index>(n.root)] = beta0;
        ok = in_bounds(n.root);
        for (std::size_t i = 1; ok && i < lay.order.size(); ++i) {
          const std::size_t c = lay.order[i];
          const std::size_t k = lay.up_edge[c];
          const std::size_t p = lay.up_node[c];
          const OrientedEdge& e = *oe[k];
          const double bp = beta[static_cast<Eigen::Index>(p)];
          double a = grid_ratio[k];
          if (kind[k] == Kind::kExact) a = exact_ratio(k, bp);
          if (!std::isfinite(a)) {
            ok = false;
            break;
          }
          const double bc = e.tail == p ? (bp - e.delta0) * a - e.delta1 : (bp + e.delta1) / a + e.delta0;
          beta[static_cast<Eigen::Index>(c)] = bc;
          ratio[static_cast<Eigen::Index>(k)] = a;
          if (e.d > 0.0) cost += e.d * (std::pow(a, e.exponent) - 1.0);
          ok = in_bounds(c);
        }
      } else {
        for (std::size_t v = 0; v < nv; ++v) beta[static_cast<Eigen::Index>(v)] = n.nodes[v].beta_max;
        beta[static_cast<Eigen::Index>(n.root)] = std::min(beta0, n.nodes[n.root].beta_max);
        for (const std::size_t k : flow_order) {
          const OrientedEdge& e = *oe[k];
          const double bt = beta[static_cast<Eigen::Index>(e.tail)];
          double t = grid_ratio[k];
          if (kind[k] == Kind::kExact) t = exact_ratio(k, bt);
          if (!std::isfinite(t)) {
            ok = false;
            break;
          }
          double& bh = beta[static_cast<Eigen::Index>(e.head)];
          bh = std::min(bh, t * (bt - e.delta0) - e.delta1);
        }
        for (std::size_t v = 0; ok && v < nv; ++v) ok = in_bounds(v);
        ok = ok && beta[static_cast<Eigen::Index>(n.root)] >= beta0 * (1.0 - 1e-12);
        if (ok) {
          for (const OrientedEdge& e : m.edges) {
            const double a = ratio_from_pressures(e, beta[static_cast<Eigen::Index>(e.tail)],
                                                  beta[static_cast<Eigen::Index>(e.head)]);
            ratio[static_cast<Eigen::Index>(e.index)] = a;
            if (e.d > 0.0) cost += e.d * (std::max(std::pow(a, e.exponent), 1.0) - 1.0);
          }
        }
      }
      if (ok && cost < best_cost) {
        best_cost = cost;
        best_beta = beta;
        best_ratio = ratio;
      }

      done = true;
      for (std::size_t g = gridded.size(); g-- > 0;) {
        if (++idx[g] < per_edge) {
          done = false;
          break;
        }
        idx[g] = 0;
      }
    }
  }

  if (cfg.allow_decompression) {
    // every strict grid point is admissible here too; its exact ratios are
    // not always on this grid
    OracleConfig strict = cfg;
    strict.allow_decompression = false;
    const OgfSolution t = brute_force(m, strict);
    if (t.feasible() && t.cost < best_cost) {
      best_cost = t.cost;
      best_beta = t.beta;
      best_ratio = t.alpha;
    }
  }

  OgfSolution s;
  s.method = "oracle";
  double slack = 0.0;
  for (const std::size_t k : gridded) {
    slack += oe[k]->d * oe[k]->exponent * (oe[k]->alpha_max - 1.0) / static_cast<double>(per_edge - 1);
  }
  s.diagnostics.set("grid_points", static_cast<double>(total));
  s.diagnostics.set("gridded_compressors", static_cast<double>(gridded.size()));
  s.diagnostics.set("grid_slack", slack);
  if (best_cost == kInf) {
    s.status = SolveStatus::kInfeasible;
    s.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
    for (std::size_t v = 0; v < nv; ++v) s.beta[static_cast<Eigen::Index>(v)] = n.nodes[v].beta_min;
    s.alpha = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n.edges.size()));
    s.diagnostics.message = "no grid point satisfies the pressure bounds";
    s.feasibility = check_feasibility(s, n, m.edges, cfg.allow_decompression);
    return s;
  }
  s.beta = best_beta;
  s.alpha = best_ratio;
  s.cost = best_cost;
  s.feasibility = check_feasibility(s, n, m.edges, cfg.allow_decompression);
  return s;
}

}  // namespace ogf
