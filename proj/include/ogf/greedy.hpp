#pragma once

#include <optional>

#include "ogf/solution.hpp"

namespace ogf {

/// Sweep from the root in depth-first order with every ratio at 1. When a
/// node falls below its lower bound, the nearest compressor upstream of it
/// (flowing away from the root) is boosted as far as its downstream upper
/// bounds and alpha_max allow. If that is not enough, compressors further
/// up are boosted in turn, re-tightening the ones below.
///
/// `root_beta` defaults to the network's root policy (free roots start at
/// beta_max). Residual violations leave the status infeasible.
OgfSolution solve_greedy(const FlowModel& m, std::optional<double> root_beta = std::nullopt);

}  // namespace ogf
