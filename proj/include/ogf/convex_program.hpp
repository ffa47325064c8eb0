#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ogf/flow.hpp"
#include "ogf/log_sum_exp.hpp"

namespace ogf {

/// minimize objective(x) subject to constraints[i](x) <= 0 and
/// lower <= x <= upper. A variable with lower == upper is fixed.
template <typename Scalar>
struct ConvexProgramT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector lower;
  Vector upper;
  std::vector<std::string> variable_names;
  LogSumExp<Scalar> objective;
  std::vector<LogSumExp<Scalar>> constraints;
  std::vector<std::string> constraint_names;

  Eigen::Index size() const { return lower.size(); }

  Eigen::Index add_variable(std::string name, Scalar lo, Scalar hi) {
    const Eigen::Index k = lower.size();
    lower.conservativeResize(k + 1);
    upper.conservativeResize(k + 1);
    lower[k] = lo;
    upper[k] = hi;
    variable_names.push_back(std::move(name));
    return k;
  }

  void add_constraint(LogSumExp<Scalar> g, std::string name) {
    constraints.push_back(std::move(g));
    constraint_names.push_back(std::move(name));
  }

  template <typename Other>
  ConvexProgramT<Other> cast() const {
    ConvexProgramT<Other> p;
    p.lower = lower.template cast<Other>();
    p.upper = upper.template cast<Other>();
    p.variable_names = variable_names;
    p.objective = objective.template cast<Other>();
    for (const auto& g : constraints) p.constraints.push_back(g.template cast<Other>());
    p.constraint_names = constraint_names;
    return p;
  }
};

using ConvexProgram = ConvexProgramT<double>;

/// Log-domain OGF with decompression allowed. Variables are the log squared
/// pressure of every node followed by the log ratio of every compressor edge.
/// `ratio_var[k]` is the variable of network edge k, or -1 without a
/// compressor.
struct OgfProgram {
  ConvexProgram program;
  std::vector<Eigen::Index> ratio_var;
  std::vector<Eigen::Index> edge_constraint;  // per network edge

  Eigen::Index node_var(std::size_t i) const { return static_cast<Eigen::Index>(i); }
};

/// Builds the convex program over oriented edges. Root pinning collapses the
/// root's box. Throws InputError when some beta_min is not positive.
OgfProgram build_convex_ogf(const Network& n, const std::vector<OrientedEdge>& edges);

/// Edge constraint log(e^{bj - bi - t} + delta1 e^{-bi - t} + delta0 e^{-bi}) <= 0
/// with t fixed at 0 when `ratio_var` is negative.
LogSumExp<double> edge_constraint(const OrientedEdge& e, Eigen::Index tail_var,
                                  Eigen::Index head_var, Eigen::Index ratio_var);

}  // namespace ogf
