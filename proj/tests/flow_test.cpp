#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ogf/flow.hpp"
#include "ogf/instances.hpp"
#include "test_networks.hpp"

using namespace ogf;
using namespace ogf::testing;

namespace {

// Sum of injections on the `from` side once edge k is cut.
double cut_sum(const Network& n, std::size_t k) {
  std::vector<bool> seen(n.node_count(), false);
  std::vector<std::size_t> stack{n.edges[k].from};
  seen[n.edges[k].from] = true;
  double sum = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    sum += n.nodes[v].injection;
    for (std::size_t j = 0; j < n.edge_count(); ++j) {
      if (j == k) continue;
      const Edge& e = n.edges[j];
      for (const auto& [a, b] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
        if (a == v && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
  }
  return sum;
}

Network random_tree(std::uint64_t seed, int nodes) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-5, 5);
  Network n;
  double sum = 0;
  for (int i = 0; i < nodes; ++i) {
    const double q = i + 1 < nodes ? u(gen) : -sum;
    sum += q;
    n.nodes.push_back({"v" + std::to_string(i), q, 1, 4, {}});
  }
  for (int i = 1; i < nodes; ++i) {
    const std::size_t p = gen() % static_cast<std::size_t>(i);
    if (gen() % 2) {
      n.edges.push_back(pipe(p, i, 1 + u(gen) * u(gen)));
    } else {
      n.edges.push_back(boosted(i, p, 2, compressor(0.3, 1.5)));
    }
    n.edges.back().drop_constant = std::abs(n.edges.back().drop_constant) + 0.1;
  }
  return n;
}

}  // namespace

TEST(ComputeFlows, Path) {
  Network n;
  n.nodes = {{"A", 5, 1, 4, {}}, {"B", -2, 1, 4, {}}, {"C", -3, 1, 4, {}}};
  n.edges = {pipe(0, 1, 1), pipe(1, 2, 1)};
  const FlowAssignment f = compute_flows(n);
  EXPECT_DOUBLE_EQ(f.flow[0], 5);
  EXPECT_DOUBLE_EQ(f.flow[1], 3);
}

TEST(ComputeFlows, StarNegativeInStoredOrientation) {
  Network n;
  n.nodes = {{"S", -4, 1, 4, {}}, {"L1", 1, 1, 4, {}}, {"L2", 3, 1, 4, {}}};
  n.edges = {pipe(0, 1, 1), pipe(0, 2, 1)};
  const FlowAssignment f = compute_flows(n);
  EXPECT_DOUBLE_EQ(f.flow[0], -1);
  EXPECT_DOUBLE_EQ(f.flow[1], -3);
}

TEST(ComputeFlows, CutPropertyAndConservation) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Network n = random_tree(seed, 2 + static_cast<int>(seed % 49));
    const FlowAssignment f = compute_flows(n);
    double scale = 1;
    for (const Node& v : n.nodes) scale = std::max(scale, std::abs(v.injection));
    for (std::size_t k = 0; k < n.edge_count(); ++k) {
      EXPECT_NEAR(f.flow[static_cast<Eigen::Index>(k)], cut_sum(n, k), 1e-12 * scale * n.node_count());
    }
    std::vector<double> out(n.node_count(), 0.0);
    for (std::size_t k = 0; k < n.edge_count(); ++k) {
      out[n.edges[k].from] += f.flow[static_cast<Eigen::Index>(k)];
      out[n.edges[k].to] -= f.flow[static_cast<Eigen::Index>(k)];
    }
    for (std::size_t i = 0; i < n.node_count(); ++i) {
      EXPECT_NEAR(out[i], n.nodes[i].injection, 1e-12 * scale * n.node_count());
    }
  }
}

TEST(Canonicalize, ReversalSwapsPosition) {
  Network n;
  n.nodes = {{"i", -2, 1, 100, {}}, {"j", 2, 1, 100, {}}};
  n.edges = {boosted(0, 1, 1, compressor(0.3, 2, 1.5, 0.75))};
  const FlowAssignment f = compute_flows(n);
  ASSERT_DOUBLE_EQ(f.flow[0], -2);
  const OrientedEdge e = canonicalize(n, f)[0];
  EXPECT_TRUE(e.reversed);
  EXPECT_EQ(e.tail, 1u);
  EXPECT_EQ(e.head, 0u);
  EXPECT_DOUBLE_EQ(e.flow, 2);
  EXPECT_NEAR(e.delta0, 2.8, 1e-15);
  EXPECT_NEAR(e.delta1, 1.2, 1e-15);
  EXPECT_DOUBLE_EQ(e.d, 1.5 * 2 / 0.75);
  EXPECT_NEAR(e.position, 0.7, 1e-15);
  EXPECT_TRUE(e.active);
}

TEST(Canonicalize, ZeroFlowInactive) {
  Network n;
  n.nodes = {{"i", 0, 1, 4, {}}, {"j", 0, 1, 4, {}}};
  n.edges = {boosted(0, 1, 1, compressor(0.3, 2))};
  const OrientedEdge e = canonicalize(n, compute_flows(n))[0];
  EXPECT_FALSE(e.reversed);
  EXPECT_FALSE(e.active);
  EXPECT_EQ(e.d, 0);
  EXPECT_EQ(e.delta0, 0);
  EXPECT_EQ(e.delta1, 0);
  EXPECT_EQ(e.alpha_max, 1);
}

TEST(Canonicalize, ForwardUnchanged) {
  const Network n = two_node();
  const OrientedEdge e = canonicalize(n, compute_flows(n))[0];
  EXPECT_FALSE(e.reversed);
  EXPECT_EQ(e.tail, 0u);
  EXPECT_DOUBLE_EQ(e.delta0 + e.delta1, 1.5);
}

TEST(Canonicalize, IdempotentAndRatioInvariant) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Network n = random_tree(seed, 8);
    const FlowAssignment f = compute_flows(n);
    const std::vector<OrientedEdge> oe = canonicalize(n, f);

    // store every edge in its canonical direction and canonicalize again
    Network flipped = n;
    FlowAssignment g = f;
    for (const OrientedEdge& e : oe) {
      Edge& s = flipped.edges[e.index];
      s.from = e.tail;
      s.to = e.head;
      if (s.compressor) s.compressor->position = e.position;
      g.flow[static_cast<Eigen::Index>(e.index)] = e.flow;
    }
    const std::vector<OrientedEdge> again = canonicalize(flipped, g);
    for (std::size_t k = 0; k < oe.size(); ++k) {
      EXPECT_FALSE(again[k].reversed);
      EXPECT_EQ(again[k].tail, oe[k].tail);
      EXPECT_DOUBLE_EQ(again[k].delta0, oe[k].delta0);
      EXPECT_DOUBLE_EQ(again[k].delta1, oe[k].delta1);
    }

    // ratio in the stored orientation with sign exponent vs canonical ratio
    for (const OrientedEdge& e : oe) {
      const Edge& s = n.edges[e.index];
      const double phi = f.flow[static_cast<Eigen::Index>(e.index)];
      if (phi == 0 || !s.has_compressor()) continue;  // plain pipes keep r = 0 both ways
      const double bi = 1 + 3 * u(gen), bj = 1 + 3 * u(gen);
      const double r = s.position(), a = s.drop_constant;
      const double stored = (bj + (1 - r) * a * phi * std::abs(phi)) / (bi - r * a * phi * std::abs(phi));
      const double sign = phi > 0 ? 1.0 : -1.0;
      const double beta_tail = e.tail == s.from ? bi : bj;
      const double beta_head = e.tail == s.from ? bj : bi;
      const double canonical = ratio_from_pressures(e, beta_tail, beta_head);
      if (std::isfinite(canonical) && canonical > 0 && stored > 0) {
        EXPECT_NEAR(std::pow(stored, sign), canonical, 1e-12 * canonical);
      }
    }
  }
}

TEST(FlowModel, GeneratedFixturesConserve) {
  const Network n = generate(transco_like_spec());
  const FlowModel m = make_flow_model(n);
  for (const OrientedEdge& e : m.edges) {
    EXPECT_GE(e.flow, 0);
    EXPECT_GE(e.delta0, 0);
    EXPECT_GE(e.delta1, 0);
    EXPECT_GE(e.d, 0);
    EXPECT_NEAR(e.delta0 + e.delta1, n.edges[e.index].drop_constant * e.flow * e.flow,
                1e-12 * (e.delta0 + e.delta1));
  }
}

TEST(FlowModel, RejectsInadmissible) {
  Network n = two_node();
  n.nodes[1].injection = -0.5;
  EXPECT_THROW(make_flow_model(n), InputError);
}
