#include "ogf/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogf {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

void Diagnostics::set(const std::string& key, double v) {
  for (auto& [k, value] : values) {
    if (k == key) {
      value = v;
      return;
    }
  }
  values.emplace_back(key, v);
}

double Diagnostics::get(const std::string& key, double fallback) const {
  for (const auto& [k, value] : values) {
    if (k == key) return value;
  }
  return fallback;
}

double evaluate_cost(const Eigen::VectorXd& alpha, const std::vector<OrientedEdge>& edges) {
  double cost = 0.0;
  for (const OrientedEdge& e : edges) {
    if (e.d == 0.0) continue;
    const double a = alpha[static_cast<Eigen::Index>(e.index)];
    cost += e.d * (std::max(std::pow(a, e.exponent), 1.0) - 1.0);
  }
  return cost;
}

Eigen::VectorXd ratios_from_pressures(const Eigen::VectorXd& beta,
                                      const std::vector<OrientedEdge>& edges) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(edges.size()));
  for (const OrientedEdge& e : edges) {
    alpha[static_cast<Eigen::Index>(e.index)] =
        ratio_from_pressures(e, beta[static_cast<Eigen::Index>(e.tail)],
                             beta[static_cast<Eigen::Index>(e.head)]);
  }
  return alpha;
}

FeasibilityReport check_feasibility(const OgfSolution& s, const Network& n,
                                    const std::vector<OrientedEdge>& edges,
                                    bool allow_decompression) {
  FeasibilityReport r;
  double worst_scaled = 0.0;
  auto note = [&](double scaled, const std::string& what) {
    if (scaled > worst_scaled) {
      worst_scaled = scaled;
      r.worst = what;
    }
  };

  for (std::size_t i = 0; i < n.nodes.size(); ++i) {
    const Node& node = n.nodes[i];
    const double b = s.beta[static_cast<Eigen::Index>(i)];
    const double below = node.beta_min - b;
    const double above = b - node.beta_max;
    const double v = std::max({below, above, 0.0});
    r.max_beta_violation = std::max(r.max_beta_violation, v);
    if (v > 0.0) {
      note(v / std::max(node.beta_max, 1.0),
           (below > above ? "lower" : "upper") + std::string(" pressure bound at node ") + node.id);
    }
  }

  for (const OrientedEdge& e : edges) {
    const double a = s.alpha[static_cast<Eigen::Index>(e.index)];
    const std::string label = n.nodes[e.tail].id + "->" + n.nodes[e.head].id;
    double v = std::max(a - e.alpha_max, 0.0);
    if (!allow_decompression) v = std::max(v, 1.0 - a);
    if (!std::isfinite(a)) v = std::numeric_limits<double>::infinity();
    r.max_alpha_violation = std::max(r.max_alpha_violation, v);
    if (v > 0.0) note(v, "compression ratio bound on edge " + label);

    const double bt = s.beta[static_cast<Eigen::Index>(e.tail)];
    const double bh = s.beta[static_cast<Eigen::Index>(e.head)];
    const double residual =
        std::isfinite(a) ? std::abs(a * (bt - e.delta0) - (bh + e.delta1))
                         : std::numeric_limits<double>::infinity();
    r.max_edge_residual = std::max(r.max_edge_residual, residual);
    const double rel = residual / std::max(n.nodes[e.head].beta_max, 1.0);
    r.max_edge_residual_rel = std::max(r.max_edge_residual_rel, rel);
    if (residual > 0.0) note(rel, "pressure balance on edge " + label);
  }
  return r;
}

}  // namespace ogf
