#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "ogf/dynamic_program.hpp"
#include "ogf/geometric_program.hpp"
#include "ogf/instances.hpp"
#include "ogf/signomial.hpp"
#include "test_networks.hpp"

using namespace ogf;
using namespace ogf::testing;

namespace {

OrientedEdge drops(double d0, double d1) {
  OrientedEdge e;
  e.delta0 = d0;
  e.delta1 = d1;
  return e;
}

// root -> a (compressor) -> b (compressor) -> c (pipe)
Network two_compressor_path() {
  Network n;
  n.nodes = {{"r", 3, 4, 9, {}}, {"a", -1, 4, 9, {}}, {"b", -1, 5, 9, {}}, {"c", -1, 6, 9, {}}};
  n.edges = {boosted(0, 1, 0.4, compressor(0.5, 1.6, 1.0, 0.8)), boosted(1, 2, 0.5, compressor(0.3, 1.8, 2.0, 0.9)),
             pipe(2, 3, 1.0)};
  return n;
}

// Nearest bin, rejecting values more than half a bin outside.
int round_to_bin(const Eigen::VectorXd& bins, double v) {
  const double lo = bins[0], hi = bins[bins.size() - 1], h = (hi - lo) / static_cast<double>(bins.size() - 1);
  if (v < lo - h / 2 || v > hi + h / 2) return -1;
  return static_cast<int>(std::clamp<long>(std::lround((v - lo) / h), 0, bins.size() - 1));
}

double gp_error(const Network& n, int nb, int na) {
  DpOptions o;
  o.n_beta = nb;
  o.n_alpha = na;
  const OgfSolution s = solve_dp(make_flow_model(n), o);
  EXPECT_TRUE(s.feasible());
  return std::abs(s.cost - two_node_optimum()) / two_node_optimum();
}

}  // namespace

TEST(ImpliedPressure, Examples) {
  EXPECT_DOUBLE_EQ(implied_pressure(2, 1.25, drops(0, 1.5), true), 1.0);
  EXPECT_DOUBLE_EQ(implied_pressure(3.7, 1, drops(0, 0), true), 3.7);
  EXPECT_DOUBLE_EQ(implied_pressure(2, 2, drops(0.5, 2), false), 2.5);
}

TEST(DpGrid, Invariants) {
  const FlowModel m = make_flow_model(two_compressor_path());
  const DpGrid g = DpGrid::uniform(m, 7, 5);
  for (std::size_t i = 0; i < m.net().node_count(); ++i) {
    EXPECT_EQ(g.beta[i][0], m.net().nodes[i].beta_min);
    EXPECT_EQ(g.beta[i][6], m.net().nodes[i].beta_max);
    for (int k = 1; k < 7; ++k) EXPECT_LT(g.beta[i][k - 1], g.beta[i][k]);
  }
  EXPECT_EQ(g.alpha[0].size(), 5);
  EXPECT_EQ(g.alpha[0][0], 1.0);
  EXPECT_EQ(g.alpha[0][4], 1.6);
  EXPECT_EQ(g.alpha[2].size(), 1);
  EXPECT_EQ(g.alpha[2][0], 1.0);
  EXPECT_EQ(DpGrid::uniform(m, 2, 1).alpha[0].size(), 1);
}

TEST(DpGrid, RejectsDegenerateSizes) {
  const FlowModel m = make_flow_model(two_node());
  try {
    DpGrid::uniform(m, 1, 10);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "nbeta must be ≥ 2");
  }
  EXPECT_THROW(DpGrid::uniform(m, 10, 0), InputError);
}

TEST(DpGrid, NearestBinWithHalfBinMargin) {
  const FlowModel m = make_flow_model(two_node());
  const DpGrid g = DpGrid::uniform(m, 4, 1);  // node j: 1, 2, 3, 4
  EXPECT_EQ(g.bin_of(1, 2.49), 1);
  EXPECT_EQ(g.bin_of(1, 2.51), 2);
  EXPECT_EQ(g.bin_of(1, 0.6), 0);
  EXPECT_EQ(g.bin_of(1, 0.4), -1);
  EXPECT_EQ(g.bin_of(1, 4.4), 3);
  EXPECT_EQ(g.bin_of(1, 4.6), -1);
  EXPECT_EQ(g.bin_of(1, -1.0), -1);
}

TEST(CostToGo, LeafTablesAreZero) {
  const FlowModel m = make_flow_model(two_compressor_path());
  const DpGrid g = DpGrid::uniform(m, 50, 20);
  const CostToGo c = build_cost_to_go(m, g);
  for (const double v : c.J[3]) EXPECT_EQ(v, 0.0);
}

TEST(CostToGo, SinglePipeIsShiftedChildTable) {
  const FlowModel m = make_flow_model(two_compressor_path());
  const DpGrid g = DpGrid::uniform(m, 60, 20);
  const CostToGo c = build_cost_to_go(m, g);
  const OrientedEdge& e = m.edges[2];
  for (int b = 0; b < 60; ++b) {
    const int child = g.bin_of(3, g.beta[2][b] - e.delta());
    const double expect = child < 0 ? INFINITY : c.J[3][static_cast<std::size_t>(child)];
    EXPECT_EQ(c.J[2][static_cast<std::size_t>(b)], expect) << b;
  }
}

TEST(CostToGo, MatchesFullEnumerationOnSameBins) {
  const Network n = two_compressor_path();
  const FlowModel m = make_flow_model(n);
  for (const auto& [nb, na] : {std::pair{40, 15}, std::pair{101, 33}, std::pair{300, 60}}) {
    const DpGrid g = DpGrid::uniform(m, nb, na);
    const OgfSolution dp = solve_dp(m, {nb, na});

    double best = INFINITY;
    const double b0 = n.pinned_root_beta();
    for (Eigen::Index s1 = 0; s1 < g.alpha[0].size(); ++s1) {
      const double a1 = g.alpha[0][s1];
      const int i1 = round_to_bin(g.beta[1], (b0 - m.edges[0].delta0) * a1 - m.edges[0].delta1);
      if (i1 < 0) continue;
      const double c1 = m.edges[0].d * (std::pow(a1, m.edges[0].exponent) - 1);
      for (Eigen::Index s2 = 0; s2 < g.alpha[1].size(); ++s2) {
        const double a2 = g.alpha[1][s2];
        const int i2 = round_to_bin(g.beta[2], (g.beta[1][i1] - m.edges[1].delta0) * a2 - m.edges[1].delta1);
        if (i2 < 0) continue;
        if (round_to_bin(g.beta[3], g.beta[2][i2] - m.edges[2].delta()) < 0) continue;
        const double c2 = m.edges[1].d * (std::pow(a2, m.edges[1].exponent) - 1);
        best = std::min(best, c1 + (c2 + (0.0 + 0.0)));
      }
    }
    ASSERT_TRUE(std::isfinite(best));
    ASSERT_TRUE(dp.feasible());
    EXPECT_EQ(dp.cost, best) << nb << "x" << na;
  }
}

TEST(Traceback, CostEqualsRootTableBitExact) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 50; ++seed) {
    const FlowModel m = make_flow_model(random_instance(seed));
    const DpGrid g = DpGrid::uniform(m, 200, 40);
    const CostToGo c = build_cost_to_go(m, g);
    const OgfSolution pinned = traceback(m, c, g, m.net().pinned_root_beta());
    const OgfSolution best = traceback(m, c, g, std::nullopt);
    if (!pinned.feasible()) continue;
    ++checked;
    EXPECT_EQ(pinned.cost, pinned.diagnostics.get("j_root")) << seed;
    ASSERT_TRUE(best.feasible());
    EXPECT_EQ(best.cost, best.diagnostics.get("j_root")) << seed;
    EXPECT_EQ(best.diagnostics.get("j_root"), *std::min_element(c.J[m.net().root].begin(), c.J[m.net().root].end()));
    for (const OrientedEdge& e : m.edges) {
      EXPECT_GE(pinned.alpha[static_cast<Eigen::Index>(e.index)], 1.0);
      EXPECT_LE(pinned.alpha[static_cast<Eigen::Index>(e.index)], e.alpha_max);
    }
  }
}

TEST(Traceback, TrivialNetworkCostsNothing) {
  RandomInstanceOptions o;
  o.feasible_uncompressed = true;
  const FlowModel m = make_flow_model(random_instance(3, o));
  const OgfSolution s = solve_dp(m, {400, 50});
  ASSERT_TRUE(s.feasible());
  EXPECT_EQ(s.cost, 0.0);
  for (Eigen::Index k = 0; k < s.alpha.size(); ++k) EXPECT_EQ(s.alpha[k], 1.0);
}

TEST(Traceback, InfeasibleRootNamesNearestBin) {
  const FlowModel m = make_flow_model(two_node());
  const DpGrid g = DpGrid::uniform(m, 11, 50);
  const CostToGo c = build_cost_to_go(m, g);
  const OgfSolution s = traceback(m, c, g, 1.0);  // (1 - 0) * 2 - 1.5 < 1 - half bin
  EXPECT_EQ(s.status, SolveStatus::kInfeasible);
  EXPECT_NE(s.diagnostics.message.find("nearest feasible root bin"), std::string::npos) << s.diagnostics.message;

  const FlowModel tight = make_flow_model(two_node(1.05));
  const OgfSolution none = solve_dp(tight, {50, 20});
  EXPECT_EQ(none.status, SolveStatus::kInfeasible);
  EXPECT_NE(none.diagnostics.message.find("no feasible root bin"), std::string::npos) << none.diagnostics.message;
}

TEST(SolveDp, TwoNodeFineGrid) {
  const OgfSolution s = solve_dp(make_flow_model(two_node()), {2000, 2000});
  ASSERT_TRUE(s.feasible());
  EXPECT_LE(std::abs(s.cost - two_node_optimum()) / two_node_optimum(), 5e-3);
}

TEST(SolveDp, RefinementNonIncreasing) {
  const Network n = two_node();
  double prev = INFINITY;
  for (int nb : {50, 100, 200, 400, 800, 1600}) {
    const double err = gp_error(n, nb, 400);
    EXPECT_LE(err, prev + 1e-12) << nb;
    prev = err;
  }
  EXPECT_LE(prev, 5e-3);
}

TEST(SolveDp, RatioBinsSaturate) {
  const Network n = two_node();
  // holds while the pressure bins are the coarser resolution; from nbeta = 400
  // on, refining alpha past 400 bins still helps on this instance
  for (int nb : {50, 100, 200}) {
    EXPECT_GE(gp_error(n, nb, 800), gp_error(n, nb, 400) - 1e-9) << nb;
  }
}

TEST(SolveDp, JointMatchesSeparable) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FlowModel m = make_flow_model(random_instance(seed));
    bool wide = false;
    const RootedTree t = build_rooted_tree(m.net(), m.net().root);
    for (const auto& kids : t.child_edges) wide = wide || kids.size() > 3;
    if (wide) continue;
    DpOptions o{120, 25, BellmanMode::kSeparable};
    const OgfSolution a = solve_dp(m, o);
    o.mode = BellmanMode::kJoint;
    const OgfSolution b = solve_dp(m, o);
    EXPECT_EQ(a.status, b.status) << seed;
    if (a.feasible()) {
      EXPECT_NEAR(a.cost, b.cost, 1e-12 * (1 + a.cost)) << seed;
    }
  }
}

TEST(SolveDp, JointRefusesWideNodes) {
  Network n;
  n.nodes = {{"hub", 4, 1, 4, {}}};
  for (int k = 0; k < 4; ++k) {
    n.nodes.push_back({"leaf" + std::to_string(k), -1, 1, 4, {}});
    n.edges.push_back(boosted(0, static_cast<std::size_t>(k + 1), 0.1, compressor(0.5, 1.5)));
  }
  const FlowModel m = make_flow_model(n);
  EXPECT_THROW(solve_dp(m, {20, 5, BellmanMode::kJoint}), InputError);
  EXPECT_NO_THROW(solve_dp(m, {20, 5, BellmanMode::kSeparable}));
}

TEST(SolveDp, WorkIsLinearInEachGridDimension) {
  const FlowModel m = make_flow_model(generate(belgian_like_spec()));
  auto evals = [&](int nb, int na) {
    const DpGrid g = DpGrid::uniform(m, nb, na);
    return build_cost_to_go(m, g).stats.evaluations;
  };
  const long long base = evals(200, 50);
  EXPECT_EQ(evals(400, 50), 2 * base);
  EXPECT_LE(evals(200, 100), 2 * base);

  auto seconds = [&](int nb, int na) {
    const DpGrid g = DpGrid::uniform(m, nb, na);
    double best = INFINITY;
    for (int k = 0; k < 3; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      build_cost_to_go(m, g);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double t = seconds(400, 100);
  EXPECT_LE(seconds(800, 100), 2 * t * 2.0);
  EXPECT_LE(seconds(400, 200), 2 * t * 2.0);
}

TEST(SolveDp, BoundedBelowByContinuousMethods) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const FlowModel m = make_flow_model(random_instance(seed));
    const OgfSolution dp = solve_dp(m, {300, 60});
    const OgfSolution gp = solve_gp(m);
    const SpResult sp = solve_signomial(m);
    if (!dp.feasible() || !gp.feasible() || !sp.solution.feasible()) continue;
    const double slack = dp.diagnostics.get("disc_slack");
    EXPECT_GE(dp.cost + slack, gp.cost - 1e-6 * (1 + gp.cost)) << seed;
    EXPECT_GE(dp.cost + slack, sp.solution.cost - 1e-6 * (1 + sp.solution.cost)) << seed;
  }
}

TEST(SolveDp, Deterministic) {
  const FlowModel m = make_flow_model(generate(belgian_like_spec()));
  const OgfSolution a = solve_dp(m), b = solve_dp(m);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.alpha, b.alpha);
}
