#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ogf/network.hpp"

namespace ogf {

/// Seeded generator; identical seeds give identical streams on every
/// platform (no std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

enum class Topology { kPath, kStar, kRandomTree };

struct GeneratorSpec {
  int node_count = 20;
  int compressor_count = 2;
  Topology topology = Topology::kPath;
  int max_branching = 3;
  int locality = 0;  // random tree: parent among the last `locality` open nodes (0 = any)
  std::uint64_t seed = 0;
  double p_min_psi = 500.0;
  double p_max_psi = 800.0;
  double flow_scale = 200.0;  // kg/s supplied at the root
  double segment_drop = 0.5;  // deepest drop between compressors, as a fraction of the beta window
  double alpha_max = 0.0;     // 0: just enough to restore the window from the worst inlet, +5%
  bool stubs = true;          // zero-injection inlet/outlet nodes around each compressor
};

/// One source at the root, withdrawals at every leaf and some interior
/// nodes. Drop constants are scaled so that no compressor-free stretch drops
/// more than `segment_drop` of the window and alpha_max can restore the
/// window from the worst inlet. Throws InputError on an inconsistent spec.
Network generate(const GeneratorSpec& spec);

struct RandomInstanceOptions {
  int max_nodes = 6;
  int max_compressors = 3;
  bool feasible_uncompressed = false;  // witness uses alpha = 1 everywhere
};

/// Small random tree with mixed sources and sinks and random edge storage
/// directions. Bounds are placed around a witness pressure profile, so the
/// instance is feasible with alpha >= 1 (with alpha = 1 when requested).
Network random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

/// Bundled fixtures: a 20-node path with 2 compressors (seed 7) and a
/// 98-node random tree with 31 compressors (seed 1), before stubs.
GeneratorSpec belgian_like_spec();
GeneratorSpec transco_like_spec();

/// Withdrawal patterns that defeat an uncompressed solve exist iff pushing
/// the root pressure through every edge at alpha = 1 violates a lower bound.
bool infeasible_without_compression(const Network& n);

}  // namespace ogf
