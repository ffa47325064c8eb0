#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ogf/solution.hpp"

namespace ogf {

/// Uniform bins: n_beta squared pressures per node in [beta_min, beta_max]
/// and n_alpha ratios per active compressor edge in [1, alpha_max]. Pipes
/// and inactive compressors get the single ratio 1.
struct DpGrid {
  std::vector<Eigen::VectorXd> beta;   // per node
  std::vector<Eigen::VectorXd> alpha;  // per network edge

  static DpGrid uniform(const FlowModel& m, int n_beta, int n_alpha);

  double beta_step(std::size_t node) const;
  double alpha_step(std::size_t edge) const;
  /// Nearest bin of `value` at `node`, or -1 when it lies more than half a
  /// bin outside the node's range (or is negative).
  int bin_of(std::size_t node, double value) const;
};

/// Pressure at the child end of `e` given the parent's pressure. With
/// `parent_is_tail` the flow runs parent to child:
///   (beta - delta0) alpha - delta1,
/// otherwise child to parent:
///   (beta + delta1) / alpha + delta0.
double implied_pressure(double beta_parent, double alpha, const OrientedEdge& e, bool parent_is_tail);

enum class BellmanMode { kSeparable, kJoint };

struct DpStats {
  long long evaluations = 0;  // (bin, ratio) combinations examined
  double seconds = 0.0;
};

struct CostToGo {
  RootedTree tree;
  std::vector<std::vector<double>> J;  // per node, per pressure bin; inf if infeasible
  std::vector<std::vector<int>> choice;  // per network edge, per parent bin: ratio bin or -1
  DpStats stats;
};

/// Joint mode enumerates the product of children's ratio bins and refuses
/// nodes with more than three children.
CostToGo build_cost_to_go(const FlowModel& m, const DpGrid& grid,
                          BellmanMode mode = BellmanMode::kSeparable);

/// Walks parent before child from the root pressure `root_beta` (nullopt:
/// best root bin). The returned cost equals the cost-to-go at the root.
OgfSolution traceback(const FlowModel& m, const CostToGo& ctg, const DpGrid& grid,
                      std::optional<double> root_beta);

/// Upper bound on how far the grid solution can undercut a continuous
/// alpha >= 1 optimum through pressure rounding and ratio spacing.
double discretization_slack(const FlowModel& m, const DpGrid& grid);

struct DpOptions {
  int n_beta = 1000;
  int n_alpha = 400;
  BellmanMode mode = BellmanMode::kSeparable;
};

/// Grid, tables and traceback at the network's root policy.
OgfSolution solve_dp(const FlowModel& m, const DpOptions& options = {});

}  // namespace ogf
