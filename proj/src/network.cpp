#include "ogf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace ogf {

std::optional<std::size_t> Network::find_node(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

double Network::pinned_root_beta() const {
  if (root_policy == RootPolicy::kPinnedToValue) return root_beta;
  return nodes.at(root).beta_max;
}

double pipe_drop_constant(const PipeParams& p) {
  const std::pair<const char*, double> fields[] = {
      {"f", p.friction},    {"Z", p.compressibility}, {"R", p.gas_constant},
      {"T", p.temperature}, {"L", p.length},          {"D", p.diameter},
  };
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0)) {
      throw InputError(name, std::string("pipe parameter ") + name + " must be positive");
    }
  }
  return p.friction * p.compressibility * p.gas_constant * p.temperature * p.length /
         p.diameter;
}

bool ValidationReport::has(ValidationIssue::Kind kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].message;
  }
  return os.str();
}

double default_balance_tolerance(const Network& n) {
  double qmax = 1.0;
  for (const auto& node : n.nodes) qmax = std::max(qmax, std::abs(node.injection));
  return 1e-9 * qmax;
}

ValidationReport validate(const Network& n) { return validate(n, default_balance_tolerance(n)); }

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate(const Network& n, double balance_tol) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  const std::size_t nv = n.nodes.size();

  std::unordered_set<std::string> seen;
  for (const auto& node : n.nodes) {
    if (!seen.insert(node.id).second) {
      report.issues.push_back({Kind::kDuplicateId, "duplicate node id " + node.id});
    }
    if (!(node.beta_min >= 0.0) || !(node.beta_min <= node.beta_max)) {
      report.issues.push_back({Kind::kBoundInversion, "pressure bounds inverted at node " + node.id});
    }
  }

  if (nv == 0 || n.root >= nv) {
    report.issues.push_back({Kind::kBadRoot, "root node does not exist"});
  } else if (n.root_policy == RootPolicy::kPinnedToValue) {
    const Node& r = n.nodes[n.root];
    if (!(n.root_beta >= r.beta_min && n.root_beta <= r.beta_max)) {
      report.issues.push_back({Kind::kBadRoot, "pinned root pressure outside bounds of " + r.id});
    }
  }

  bool refs_ok = true;
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    const Edge& e = n.edges[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (e.from >= nv || e.to >= nv) {
      report.issues.push_back({Kind::kBadReference, "unknown node reference at " + where});
      refs_ok = false;
      continue;
    }
    if (e.from == e.to) {
      report.issues.push_back({Kind::kCycle, "cycle detected (self-loop at " + where + ")"});
    }
    if (!(e.drop_constant > 0.0)) {
      report.issues.push_back({Kind::kBadEdgeParameter, "drop constant must be positive at " + where});
    }
    if (e.compressor) {
      const Compressor& c = *e.compressor;
      if (!(c.position >= 0.0 && c.position <= 1.0))
        report.issues.push_back({Kind::kBadEdgeParameter, "compressor position outside [0,1] at " + where});
      if (!(c.alpha_max >= 1.0))
        report.issues.push_back({Kind::kBadEdgeParameter, "alpha_max below 1 at " + where});
      if (!(c.efficiency > 0.0 && c.efficiency <= 1.0))
        report.issues.push_back({Kind::kBadEdgeParameter, "efficiency outside (0,1] at " + where});
      if (!(c.exponent > 0.0 && c.exponent < 1.0))
        report.issues.push_back({Kind::kBadEdgeParameter, "exponent m outside (0,1) at " + where});
      if (!(c.cost_coeff >= 0.0))
        report.issues.push_back({Kind::kBadEdgeParameter, "negative cost coefficient at " + where});
    }
  }

  if (refs_ok && nv > 0) {
    if (n.edges.size() + 1 != nv) {
      if (n.edges.size() + 1 > nv) {
        report.issues.push_back({Kind::kCycle, "cycle detected"});
      }
    }
    std::vector<std::size_t> uf(nv);
    std::iota(uf.begin(), uf.end(), 0);
    bool cycle = false;
    for (const Edge& e : n.edges) {
      const std::size_t a = find_root(uf, e.from), b = find_root(uf, e.to);
      if (a == b) {
        cycle = true;
      } else {
        uf[a] = b;
      }
    }
    if (cycle && !report.has(Kind::kCycle)) {
      report.issues.push_back({Kind::kCycle, "cycle detected"});
    }
    std::size_t components = 0;
    for (std::size_t i = 0; i < nv; ++i) components += (find_root(uf, i) == i);
    if (components > 1) {
      report.issues.push_back({Kind::kDisconnected, "disconnected components: " + std::to_string(components)});
    }
  }

  double total = 0.0;
  for (const auto& node : n.nodes) total += node.injection;
  if (std::abs(total) > balance_tol) {
    report.issues.push_back(
        {Kind::kUnbalanced, "injections unbalanced by " + format_number(std::abs(total))});
  }
  return report;
}

RootedTree build_rooted_tree(const Network& n, std::size_t root) {
  const std::size_t nv = n.nodes.size();
  std::vector<std::vector<std::size_t>> incident(nv);
  for (std::size_t k = 0; k < n.edges.size(); ++k) {
    incident[n.edges[k].from].push_back(k);
    incident[n.edges[k].to].push_back(k);
  }

  RootedTree t;
  t.root = root;
  t.parent.assign(nv, RootedTree::kNone);
  t.parent_edge.assign(nv, RootedTree::kNone);
  t.child_edges.assign(nv, {});
  t.preorder.reserve(nv);

  std::vector<bool> visited(nv, false);
  std::vector<std::size_t> stack{root};
  visited[root] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    t.preorder.push_back(v);
    auto& kids = t.child_edges[v];
    for (std::size_t k : incident[v]) {
      const std::size_t w = RootedTree::other_end(n.edges[k], v);
      if (visited[w]) continue;
      visited[w] = true;
      t.parent[w] = v;
      t.parent_edge[w] = k;
      kids.push_back(k);
    }
    const bool all_mileposts =
        !kids.empty() && std::all_of(kids.begin(), kids.end(), [&](std::size_t k) {
          return n.nodes[RootedTree::other_end(n.edges[k], v)].milepost_km.has_value();
        });
    if (all_mileposts) {
      std::stable_sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) {
        return *n.nodes[RootedTree::other_end(n.edges[a], v)].milepost_km <
               *n.nodes[RootedTree::other_end(n.edges[b], v)].milepost_km;
      });
    }
    // Depth-first: push in reverse so the first child is visited first.
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      stack.push_back(RootedTree::other_end(n.edges[*it], v));
    }
  }
  return t;
}

}  // namespace ogf
