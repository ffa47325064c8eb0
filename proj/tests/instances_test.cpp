#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ogf/dynamic_program.hpp"
#include "ogf/greedy.hpp"
#include "ogf/instances.hpp"
#include "ogf/network_io.hpp"
#include "ogf/signomial.hpp"
#include "test_networks.hpp"

using namespace ogf;
using namespace ogf::testing;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int compressors(const Network& n) {
  int c = 0;
  for (const Edge& e : n.edges) c += e.has_compressor() ? 1 : 0;
  return c;
}

}  // namespace

TEST(Rng, SeededStreamsRepeat) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs = differs || x != c.uniform();
    const int i = a.integer(3, 7);
    EXPECT_EQ(i, b.integer(3, 7));
    EXPECT_GE(i, 3);
    EXPECT_LE(i, 7);
    c.integer(3, 7);
  }
  EXPECT_TRUE(differs);
}

TEST(Generate, BelgianScale) {
  const GeneratorSpec spec = belgian_like_spec();
  EXPECT_EQ(spec.node_count, 20);
  EXPECT_EQ(spec.compressor_count, 2);
  EXPECT_EQ(spec.topology, Topology::kPath);
  EXPECT_EQ(spec.seed, 7u);
  const Network n = generate(spec);
  EXPECT_TRUE(validate(n).ok()) << validate(n).summary();
  EXPECT_EQ(compressors(n), 2);
  EXPECT_EQ(n.node_count(), 20u + 2u * 2u);  // inlet and outlet stubs
  EXPECT_TRUE(infeasible_without_compression(n));
}

TEST(Generate, TranscoScale) {
  const GeneratorSpec spec = transco_like_spec();
  EXPECT_EQ(spec.node_count, 98);
  EXPECT_EQ(spec.compressor_count, 31);
  EXPECT_EQ(spec.topology, Topology::kRandomTree);
  EXPECT_EQ(spec.seed, 1u);
  const Network n = generate(spec);
  EXPECT_TRUE(validate(n).ok()) << validate(n).summary();
  EXPECT_EQ(compressors(n), 31);
  EXPECT_TRUE(infeasible_without_compression(n));
  const RootedTree t = build_rooted_tree(n, n.root);
  for (std::size_t v = 0; v < n.node_count(); ++v) EXPECT_LE(t.child_edges[v].size(), 3u);
}

TEST(Generate, Deterministic) {
  EXPECT_EQ(serialize_network(generate(transco_like_spec())), serialize_network(generate(transco_like_spec())));
  GeneratorSpec other = transco_like_spec();
  other.seed = 2;
  EXPECT_NE(serialize_network(generate(other)), serialize_network(generate(transco_like_spec())));
}

TEST(Generate, AlwaysBalancedConnectedAcyclic) {
  for (const Topology t : {Topology::kPath, Topology::kStar, Topology::kRandomTree}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      GeneratorSpec s;
      s.topology = t;
      s.seed = seed;
      s.node_count = 5 + static_cast<int>(seed * 3);
      s.compressor_count = static_cast<int>(seed % 4);
      s.stubs = seed % 2 == 0;
      s.locality = static_cast<int>(seed % 3);
      const Network n = generate(s);
      EXPECT_TRUE(validate(n).ok()) << seed << " " << validate(n).summary();
      EXPECT_EQ(compressors(n), s.compressor_count);
      for (const Node& v : n.nodes) EXPECT_TRUE(v.milepost_km.has_value());
    }
  }
}

TEST(Generate, RejectsInconsistentSpec) {
  GeneratorSpec s;
  s.node_count = 4;
  s.compressor_count = 4;  // only 3 edges
  EXPECT_THROW(generate(s), InputError);
  s.compressor_count = 1;
  s.node_count = 1;
  EXPECT_THROW(generate(s), InputError);
}

TEST(RandomInstance, SmallAndFeasible) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Network n = random_instance(seed);
    EXPECT_TRUE(validate(n).ok()) << seed;
    EXPECT_LE(n.node_count(), 6u);
    EXPECT_LE(compressors(n), 3);
    EXPECT_EQ(serialize_network(n), serialize_network(random_instance(seed)));
  }
}

TEST(RandomInstance, FeasibleUncompressedIsTrivial) {
  RandomInstanceOptions o;
  o.feasible_uncompressed = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Network n = random_instance(seed, o);
    EXPECT_FALSE(infeasible_without_compression(n)) << seed;
  }
}

TEST(Fixtures, FilesMatchGenerator) {
  EXPECT_EQ(slurp(fixture_path("belgian_like.json")), serialize_network(generate(belgian_like_spec())));
  EXPECT_EQ(slurp(fixture_path("transco_like.json")), serialize_network(generate(transco_like_spec())));
}

TEST(Fixtures, ManifestCertified) {
  const auto manifest = nlohmann::json::parse(slurp(fixture_path("manifest.json")));
  ASSERT_EQ(manifest["fixtures"].size(), 2u);
  for (const auto& f : manifest["fixtures"]) {
    const Network n = load_network(fixture_path(f["file"].get<std::string>()));
    EXPECT_TRUE(f["uncompressed_infeasible"].get<bool>());
    EXPECT_EQ(f["compressors"].get<int>(), compressors(n));
    const FlowModel m = make_flow_model(n);
    const SpResult sp = solve_signomial(m);
    ASSERT_TRUE(sp.solution.feasible());
    const double certified = f["certified_cost"].get<double>();
    EXPECT_NEAR(sp.solution.cost, certified, 1e-9 * certified);
    // cross-method agreement behind the certificate
    EXPECT_NEAR(f["gp_cost"].get<double>(), certified, 1e-6 * certified);
    EXPECT_NEAR(f["dp_cost"].get<double>(), certified, 1e-2 * certified);
    EXPECT_GE(f["greedy_cost"].get<double>(), certified);
  }
}
