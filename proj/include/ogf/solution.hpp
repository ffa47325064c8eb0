#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ogf/flow.hpp"

namespace ogf {

enum class SolveStatus { kOptimal, kInfeasible, kIterationLimit };

const char* to_string(SolveStatus s);

struct FeasibilityReport {
  double max_beta_violation = 0.0;   // Pa^2, absolute
  double max_alpha_violation = 0.0;  // ratio units
  double max_edge_residual = 0.0;    // |alpha (beta_t - delta0) - (beta_h + delta1)|, Pa^2
  double max_edge_residual_rel = 0.0;  // edge residual divided by the head's beta_max
  std::string worst;                 // description of the largest violation

  bool within(double beta_tol, double alpha_tol, double edge_rel_tol) const {
    return max_beta_violation <= beta_tol && max_alpha_violation <= alpha_tol &&
           max_edge_residual_rel <= edge_rel_tol;
  }
};

struct Diagnostics {
  int iterations = 0;
  double kkt_residual = 0.0;
  std::string message;
  std::vector<std::pair<std::string, double>> values;

  void set(const std::string& key, double v);
  double get(const std::string& key, double fallback = 0.0) const;
};

/// Squared pressures per node, physical compression ratios per network edge
/// (in the flow direction), and the resulting cost.
struct OgfSolution {
  std::string method;
  SolveStatus status = SolveStatus::kOptimal;
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;
  double cost = 0.0;
  Diagnostics diagnostics;
  FeasibilityReport feasibility;

  bool feasible() const { return status == SolveStatus::kOptimal; }
};

/// C = sum d (max{alpha^m, 1} - 1); ratios below one cost nothing.
/// `alpha` is indexed by network edge.
double evaluate_cost(const Eigen::VectorXd& alpha, const std::vector<OrientedEdge>& edges);

/// Physical ratio for every network edge from squared pressures, including
/// plain pipes (a value below one there means throttling).
Eigen::VectorXd ratios_from_pressures(const Eigen::VectorXd& beta,
                                      const std::vector<OrientedEdge>& edges);

/// Bound and balance violations of `s`. With `allow_decompression` the ratio
/// lower bound is dropped; otherwise every edge needs alpha >= 1.
FeasibilityReport check_feasibility(const OgfSolution& s, const Network& n,
                                    const std::vector<OrientedEdge>& edges,
                                    bool allow_decompression);

}  // namespace ogf
