#include "ogf/instances.hpp"

#include <algorithm>
#include <cmath>

#include "ogf/flow.hpp"

namespace ogf {

namespace {

std::vector<int> random_parents(int count, Topology topology, int max_branching, int locality, Rng& rng) {
  std::vector<int> parent(static_cast<std::size_t>(count), -1);
  std::vector<int> kids(static_cast<std::size_t>(count), 0);
  for (int i = 1; i < count; ++i) {
    int p = 0;
    switch (topology) {
      case Topology::kPath:
        p = i - 1;
        break;
      case Topology::kStar:
        p = 0;
        break;
      case Topology::kRandomTree: {
        std::vector<int> open;
        for (int j = 0; j < i; ++j) {
          if (kids[static_cast<std::size_t>(j)] < max_branching) open.push_back(j);
        }
        if (locality > 0 && static_cast<int>(open.size()) > locality) open.erase(open.begin(), open.end() - locality);
        p = open[static_cast<std::size_t>(rng.integer(0, static_cast<int>(open.size()) - 1))];
        break;
      }
    }
    parent[static_cast<std::size_t>(i)] = p;
    ++kids[static_cast<std::size_t>(p)];
  }
  return parent;
}

std::string node_name(int i) { return "N" + std::to_string(i); }

}  // namespace

Network generate(const GeneratorSpec& spec) {
  if (spec.node_count < 2) throw InputError("node_count", "need at least 2 nodes");
  if (spec.compressor_count < 0 || spec.compressor_count > spec.node_count - 1) {
    throw InputError("compressor_count", "more compressors than edges");
  }
  if (spec.topology == Topology::kRandomTree && spec.max_branching < 1) {
    throw InputError("max_branching", "branching must be at least 1");
  }
  if (!(spec.p_min_psi > 0.0 && spec.p_min_psi < spec.p_max_psi)) {
    throw InputError("pressure_window", "need 0 < p_min < p_max");
  }
  Rng rng(spec.seed);
  const int n = spec.node_count;
  const std::vector<int> parent = random_parents(n, spec.topology, spec.max_branching, spec.locality, rng);

  std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
  for (int i = 1; i < n; ++i) kids[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])].push_back(i);

  // Withdrawals at leaves always, at interior nodes half the time.
  std::vector<double> take(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    const bool leaf = kids[static_cast<std::size_t>(i)].empty();
    const double u = rng.uniform();
    if (leaf || u < 0.5) take[static_cast<std::size_t>(i)] = rng.uniform(0.5, 1.5);
  }
  double total = 0.0;
  for (double t : take) total += t;
  for (double& t : take) t *= spec.flow_scale / total;

  // Edge flow = withdrawals below the child.
  std::vector<double> below(take);
  for (int i = n - 1; i >= 1; --i) below[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])] += below[static_cast<std::size_t>(i)];

  std::vector<double> length(static_cast<std::size_t>(n), 0.0), milepost(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    length[s] = rng.uniform(20.0, 80.0);
    milepost[s] = milepost[static_cast<std::size_t>(parent[s])] + length[s];
  }

  // Compressors split the currently deepest compressor-free stretch near
  // its middle. Edges are identified by their child node.
  std::vector<bool> boosted(static_cast<std::size_t>(n), false);
  std::vector<double> seg_depth(static_cast<std::size_t>(n), 0.0);
  auto depths = [&]() {
    double deepest = 0.0;
    int arg = 0;
    for (int i = 1; i < n; ++i) {
      const std::size_t s = static_cast<std::size_t>(i);
      seg_depth[s] = (boosted[s] ? 0.0 : seg_depth[static_cast<std::size_t>(parent[s])]) + length[s];
      if (seg_depth[s] > deepest) {
        deepest = seg_depth[s];
        arg = i;
      }
    }
    return std::pair{deepest, arg};
  };
  for (int k = 0; k < spec.compressor_count; ++k) {
    auto [deepest, v] = depths();
    const double cut = deepest * rng.uniform(0.35, 0.65);
    int pick = -1, shallowest = -1;
    for (int u = v; u > 0 && !boosted[static_cast<std::size_t>(u)]; u = parent[static_cast<std::size_t>(u)]) {
      const std::size_t s = static_cast<std::size_t>(u);
      shallowest = u;
      if (pick < 0 && seg_depth[s] - length[s] <= cut) pick = u;
    }
    if (pick < 0) pick = shallowest;
    if (pick < 0) {
      // Deepest stretch is a single boosted edge; take any free edge.
      for (int u = 1; u < n && pick < 0; ++u) {
        if (!boosted[static_cast<std::size_t>(u)]) pick = u;
      }
    }
    boosted[static_cast<std::size_t>(pick)] = true;
  }
  depths();

  const double beta_min = std::pow(psi_to_pascal(spec.p_min_psi), 2);
  const double beta_max = std::pow(psi_to_pascal(spec.p_max_psi), 2);
  const double window = beta_max - beta_min;

  // Each compressor-free stretch gets its own drop scale: its deepest path
  // drops segment_drop * window, jittered down by up to 20%.
  std::vector<int> top(static_cast<std::size_t>(n), 0);
  std::vector<double> seg_max(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    top[s] = boosted[s] ? i : top[static_cast<std::size_t>(parent[s])];
    seg_max[static_cast<std::size_t>(top[s])] = std::max(seg_max[static_cast<std::size_t>(top[s])], seg_depth[s]);
  }
  std::vector<double> per_km(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    if (seg_max[s] > 0.0) per_km[s] = spec.segment_drop * window * rng.uniform(0.8, 1.0) / seg_max[s];
  }
  auto scale = [&](int i) { return per_km[static_cast<std::size_t>(top[static_cast<std::size_t>(i)])]; };
  const double alpha_max = spec.alpha_max > 0.0
                               ? spec.alpha_max
                               : 1.05 * (beta_min + spec.segment_drop * window) / beta_min;

  Network net;
  auto add_node = [&](const std::string& id, double q, double mp) {
    Node node;
    node.id = id;
    node.injection = q;
    node.beta_min = beta_min;
    node.beta_max = beta_max;
    node.milepost_km = mp;
    net.nodes.push_back(node);
    return net.nodes.size() - 1;
  };
  std::vector<std::size_t> index(static_cast<std::size_t>(n));
  index[0] = add_node(node_name(0), spec.flow_scale, 0.0);
  constexpr double kStubKm = 0.001;
  for (int i = 1; i < n; ++i) {
    const std::size_t s = static_cast<std::size_t>(i);
    const double phi = below[s];
    std::size_t from = index[static_cast<std::size_t>(parent[s])];
    double km = length[s];
    const double start_mp = milepost[static_cast<std::size_t>(parent[s])];
    if (boosted[s]) {
      Compressor c;
      c.position = 0.5;
      c.alpha_max = alpha_max;
      c.cost_coeff = 1.0;
      c.efficiency = rng.uniform(0.7, 0.9);
      if (spec.stubs) {
        const std::size_t in = add_node(node_name(i) + "_in", 0.0, start_mp + kStubKm);
        const std::size_t out = add_node(node_name(i) + "_out", 0.0, start_mp + 2 * kStubKm);
        const double up = scale(parent[s]);
        net.edges.push_back({from, in, up * kStubKm / (phi * phi), {}, {}});
        net.edges.push_back({in, out, up * kStubKm / (phi * phi), {}, c});
        from = out;
        km -= 2 * kStubKm;
        net.edges.push_back({from, 0, scale(i) * km / (phi * phi), {}, {}});
      } else {
        net.edges.push_back({from, 0, scale(i) * km / (phi * phi), {}, c});
      }
    } else {
      net.edges.push_back({from, 0, scale(i) * km / (phi * phi), {}, {}});
    }
    index[s] = add_node(node_name(i), -take[s], milepost[s]);
    net.edges.back().to = index[s];
  }
  net.root = 0;
  net.root_policy = RootPolicy::kPinnedToBetaMax;
  return net;
}

Network random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  Rng rng(seed);
  const int n = rng.integer(2, std::max(2, options.max_nodes));
  const std::vector<int> parent = random_parents(n, Topology::kRandomTree, 3, 0, rng);
  const double beta_ref = std::pow(psi_to_pascal(700.0), 2);

  Network net;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Node node;
    node.id = node_name(i);
    node.injection = i == 0 ? 0.0 : std::round(rng.uniform(-50.0, 50.0) * 100.0) / 100.0;
    sum += node.injection;
    net.nodes.push_back(node);
  }
  net.nodes[0].injection = -sum;

  for (int i = 1; i < n; ++i) {
    Edge e;
    const bool stored_down = rng.uniform() < 0.5;
    e.from = static_cast<std::size_t>(stored_down ? parent[static_cast<std::size_t>(i)] : i);
    e.to = static_cast<std::size_t>(stored_down ? i : parent[static_cast<std::size_t>(i)]);
    e.drop_constant = 1.0;
    net.edges.push_back(e);
  }
  const int edges = n - 1;
  const int k = rng.integer(0, std::min(options.max_compressors, edges));
  std::vector<int> pool;
  for (int j = 0; j < edges; ++j) pool.push_back(j);
  for (int j = 0; j < k; ++j) {
    const int pick = rng.integer(0, static_cast<int>(pool.size()) - 1);
    Compressor c;
    c.position = rng.uniform(0.1, 0.9);
    c.alpha_max = rng.uniform(1.2, 2.0);
    c.cost_coeff = rng.uniform(0.5, 2.0);
    c.efficiency = rng.uniform(0.7, 1.0);
    net.edges[static_cast<std::size_t>(pool[static_cast<std::size_t>(pick)])].compressor = c;
    pool.erase(pool.begin() + pick);
  }

  const FlowAssignment f = compute_flows(net);
  std::vector<double> drop_fraction(static_cast<std::size_t>(edges));
  for (int j = 0; j < edges; ++j) drop_fraction[static_cast<std::size_t>(j)] = rng.uniform(0.02, 0.12);
  std::vector<double> witness_alpha(static_cast<std::size_t>(edges), 1.0);
  for (int j = 0; j < edges; ++j) {
    const Edge& e = net.edges[static_cast<std::size_t>(j)];
    const double u = rng.uniform();
    if (e.compressor && !options.feasible_uncompressed) witness_alpha[static_cast<std::size_t>(j)] = 1.0 + (e.compressor->alpha_max - 1.0) * u;
  }
  const double lo_u = rng.uniform(0.0, 0.15);
  std::vector<double> spread_lo(static_cast<std::size_t>(n)), spread_hi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    spread_lo[static_cast<std::size_t>(i)] = rng.uniform(0.0, lo_u);
    spread_hi[static_cast<std::size_t>(i)] = rng.uniform(0.0, 0.25);
  }

  // Witness pressures; shrink drops until every pressure stays well positive.
  const RootedTree tree = build_rooted_tree(net, 0);
  for (double scale = 1.0;; scale *= 0.5) {
    for (int j = 0; j < edges; ++j) {
      const double phi = std::abs(f.flow[j]);
      const double delta = scale * drop_fraction[static_cast<std::size_t>(j)] * beta_ref;
      net.edges[static_cast<std::size_t>(j)].drop_constant = phi > 1e-6 ? delta / (phi * phi) : delta;
    }
    const std::vector<OrientedEdge> oe = canonicalize(net, f);
    std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
    beta[0] = beta_ref;
    bool ok = true;
    for (const std::size_t v : tree.preorder) {
      for (const std::size_t kk : tree.child_edges[v]) {
        const OrientedEdge& e = oe[kk];
        const std::size_t c = RootedTree::other_end(net.edges[kk], v);
        const double a = e.active ? witness_alpha[kk] : 1.0;
        beta[c] = e.tail == v ? (beta[v] - e.delta0) * a - e.delta1 : (beta[v] + e.delta1) / a + e.delta0;
        if (e.tail == v && !(beta[v] - e.delta0 > 0.2 * beta_ref)) ok = false;
        if (!(beta[c] > 0.2 * beta_ref)) ok = false;
      }
    }
    if (!ok) continue;
    for (int i = 0; i < n; ++i) {
      Node& node = net.nodes[static_cast<std::size_t>(i)];
      node.beta_min = beta[static_cast<std::size_t>(i)] * (1.0 - spread_lo[static_cast<std::size_t>(i)]);
      node.beta_max = beta[static_cast<std::size_t>(i)] * (1.0 + spread_hi[static_cast<std::size_t>(i)]);
    }
    net.nodes[0].beta_max = beta_ref;
    break;
  }
  net.root = 0;
  net.root_policy = RootPolicy::kPinnedToBetaMax;
  return net;
}

GeneratorSpec belgian_like_spec() {
  GeneratorSpec s;
  s.node_count = 20;
  s.compressor_count = 2;
  s.topology = Topology::kPath;
  s.segment_drop = 0.4;
  s.seed = 7;
  return s;
}

GeneratorSpec transco_like_spec() {
  GeneratorSpec s;
  s.node_count = 98;
  s.compressor_count = 31;
  s.topology = Topology::kRandomTree;
  s.max_branching = 3;
  s.locality = 3;
  s.segment_drop = 0.4;
  s.seed = 1;
  return s;
}

bool infeasible_without_compression(const Network& n) {
  const FlowAssignment f = compute_flows(n);
  const std::vector<OrientedEdge> oe = canonicalize(n, f);
  const RootedTree tree = build_rooted_tree(n, n.root);
  std::vector<double> beta(n.nodes.size(), 0.0);
  beta[n.root] = n.pinned_root_beta();
  for (const std::size_t v : tree.preorder) {
    for (const std::size_t k : tree.child_edges[v]) {
      const OrientedEdge& e = oe[k];
      const std::size_t c = RootedTree::other_end(n.edges[k], v);
      beta[c] = e.tail == v ? beta[v] - e.delta() : beta[v] + e.delta();
    }
  }
  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    if (beta[i] < n.nodes[i].beta_min || beta[i] > n.nodes[i].beta_max) return true;
  }
  return false;
}

}  // namespace ogf
