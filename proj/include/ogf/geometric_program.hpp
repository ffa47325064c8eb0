#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ogf/convex_program.hpp"
#include "ogf/interior_point.hpp"
#include "ogf/solution.hpp"

namespace ogf {

/// Interior start: log-pressure box midpoints, log ratios at
/// min(0.5 log alpha_max, 0.1).
Eigen::VectorXd gp_initial_point(const OgfProgram& p, const std::vector<OrientedEdge>& edges);

/// Back to physical variables. Ratios come from the recovered pressures, so
/// they drop below one where the solution throttles.
OgfSolution recover(const FlowModel& m, const OgfProgram& p, const ConvexSolution& s);

struct GpResult {
  OgfProgram program;
  ConvexSolution log_solution;
  OgfSolution solution;
};

GpResult solve_gp_full(const FlowModel& m, const InteriorPointOptions& options = {});

inline OgfSolution solve_gp(const FlowModel& m, const InteriorPointOptions& options = {}) {
  return solve_gp_full(m, options).solution;
}

}  // namespace ogf
