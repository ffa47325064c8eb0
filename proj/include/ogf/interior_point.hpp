#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ogf/convex_program.hpp"
#include "ogf/solution.hpp"

namespace ogf {

struct InteriorPointOptions {
  double tol = 1e-8;  // stationarity and complementarity target
  int max_iterations = 200;  // per phase
  double mu = 10.0;          // barrier parameter growth factor
  double armijo = 0.01;
  double backtrack = 0.5;
  double infeasibility_tol = 1e-7;  // phase I optimum above this means infeasible
};

/// Solution of a ConvexProgram with its KKT certificate. Multipliers are
/// reported for every program constraint and for both sides of every box.
struct ConvexSolution {
  SolveStatus status = SolveStatus::kOptimal;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;        // per program constraint
  Eigen::VectorXd lower_multipliers;  // per variable (zero for fixed ones)
  Eigen::VectorXd upper_multipliers;
  double objective = 0.0;
  int iterations = 0;
  int phase1_iterations = 0;
  double stationarity = 0.0;
  double primal_infeasibility = 0.0;
  double complementarity = 0.0;
  double relaxation = 0.0;  // constraint shift used when the interior is empty
  std::string most_violated;  // set when infeasible
  double max_violation = 0.0;

  double kkt_residual() const {
    return std::max({stationarity, primal_infeasibility, complementarity});
  }
};

/// Primal-dual interior-point method with a phase-I feasibility search.
/// Fixed variables are eliminated before solving. `start`, if given, is used
/// as the initial point; otherwise box midpoints.
ConvexSolution solve_convex(const ConvexProgram& p, const InteriorPointOptions& options,
                            const std::optional<Eigen::VectorXd>& start = std::nullopt);

inline ConvexSolution solve_convex(const ConvexProgram& p, double tol) {
  InteriorPointOptions o;
  o.tol = tol;
  return solve_convex(p, o);
}

/// KKT residuals of (x, multipliers) recomputed from the program data alone.
struct KktResiduals {
  double stationarity = 0.0;
  double primal_infeasibility = 0.0;
  double complementarity = 0.0;
};
KktResiduals kkt_residuals(const ConvexProgram& p, const ConvexSolution& s);

}  // namespace ogf
