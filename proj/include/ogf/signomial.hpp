#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ogf/geometric_program.hpp"

namespace ogf {

struct SpConfig {
  double epsilon = 1e-3;
  double delta = 1e-6;
  int max_iters = 100;
  std::vector<bool> decompression_allowed;  // per network edge; empty = none
  bool snap = true;
  InteriorPointOptions solver;

  static SpConfig large() {
    SpConfig c;
    c.epsilon = 1e-2;
    c.delta = 1e-3;
    return c;
  }
};

struct SpIteration {
  double cost = 0.0;       // sum d e^{m t} - sum d at the iterate
  double step_norm = 0.0;  // ||x(t) - x(t-1)||_2
  SolveStatus status = SolveStatus::kOptimal;
  int solver_iterations = 0;
};

struct SpTrace {
  std::vector<SpIteration> iterations;
};

/// bi <= log(e^{bj} + delta): the compressor (or pipe) never lowers pressure.
struct NoDecompressionConstraint {
  Eigen::Index tail_var = 0;
  Eigen::Index head_var = 0;
  double delta = 0.0;

  double rhs(double bj) const { return std::log(std::exp(bj) + delta); }
  /// bi - log(e^{bj} + delta); positive means violated.
  double violation(const Eigen::VectorXd& x) const { return x[tail_var] - rhs(x[head_var]); }
};

NoDecompressionConstraint no_decompression_constraint(const OrientedEdge& e, Eigen::Index tail_var,
                                                      Eigen::Index head_var);

/// bi <= intercept + slope * bj, the tangent of the right side at the
/// current bj plus epsilon.
struct LinearizedConstraint {
  Eigen::Index tail_var = 0;
  Eigen::Index head_var = 0;
  double slope = 1.0;
  double intercept = 0.0;

  double bound(double bj) const { return intercept + slope * bj; }
  LogSumExp<double> as_function() const;  // bi - slope bj - intercept <= 0
};

LinearizedConstraint linearize(const NoDecompressionConstraint& c, double bj_current, double epsilon);

struct SpResult {
  OgfSolution solution;
  SpTrace trace;
  Eigen::VectorXd x;  // final log-domain iterate
  double raw_cost = 0.0;
  double snapped_cost = 0.0;
  bool snapped = false;
};

/// Iterates from `start` (a log-domain point, normally the GP solution).
SpResult solve_signomial(const FlowModel& m, const SpConfig& cfg, const Eigen::VectorXd& start);
/// Solves the GP first and starts from it. If the first subproblem is
/// infeasible, restarts from the GP solution repaired to alpha >= 1 (or the
/// greedy solution); diagnostics "restarted" is 1 or 2 in that case.
SpResult solve_signomial(const FlowModel& m, const SpConfig& cfg = {});

/// Root-to-leaf repair: every ratio is moved into [1, alpha_max] by
/// recomputing child pressures, once holding pressures and once holding
/// ratios where possible; the cheaper repair inside the bounds wins. Returns
/// false (leaving `s` untouched) when neither stays inside.
bool snap_ratios(const FlowModel& m, OgfSolution& s);

}  // namespace ogf
