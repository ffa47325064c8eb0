#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ogf/solution.hpp"

namespace ogf {

struct OracleConfig {
  int alpha_points = 1001;  // grid points per enumerated compressor, endpoints included
  bool allow_decompression = false;
  std::vector<double> root_betas;  // empty: the network's root policy
  int root_points = 41;            // scanned when the root is free
  long long max_points = 20'000'000;
};

class OracleCapExceeded : public std::runtime_error {
 public:
  OracleCapExceeded(long long required, long long cap)
      : std::runtime_error("oracle grid needs " + std::to_string(required) + " points, cap is " +
                           std::to_string(cap)),
        required_(required) {}
  long long required() const { return required_; }

 private:
  long long required_;
};

/// Exhaustive enumeration over a product grid of compressor ratios.
///
/// Without decompression every edge holds its pressure relation with
/// equality. A compressor with no other boostable compressor on its far
/// side is not gridded: its smallest admissible ratio is computed in closed
/// form from the pressure window of that subtree.
///
/// With decompression every edge may additionally throttle, and the
/// greatest feasible pressures for each grid point are checked.
OgfSolution brute_force(const FlowModel& m, const OracleConfig& cfg = {});

}  // namespace ogf
