#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ogf/network.hpp"

namespace ogf {

/// Signed mass flux per edge, positive in the stored from->to direction.
struct FlowAssignment {
  Eigen::VectorXd flow;
};

/// An edge relabelled so that its flow is nonnegative, carrying the constants
/// every optimizer works with:
///   d      = c phi / eta            (cost scale)
///   delta0 = r a phi^2              (tail to compressor inlet drop in beta)
///   delta1 = (1 - r) a phi^2        (compressor outlet to head drop in beta)
/// `active` is false for edges without a compressor and for zero-flow
/// compressor edges; those have their ratio pinned to 1.
struct OrientedEdge {
  std::size_t index = 0;  // position in Network::edges
  std::size_t tail = 0;
  std::size_t head = 0;
  bool reversed = false;
  double flow = 0.0;
  double position = 0.0;
  double d = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double alpha_max = 1.0;
  double exponent = 0.5;
  bool has_compressor = false;
  bool active = false;

  double delta() const { return delta0 + delta1; }
};

FlowAssignment compute_flows(const Network& n);

/// Flows whose magnitude is at most `zero_tol` are treated as zero.
std::vector<OrientedEdge> canonicalize(const Network& n, const FlowAssignment& f, double zero_tol);
std::vector<OrientedEdge> canonicalize(const Network& n, const FlowAssignment& f);

/// Everything downstream solvers need: the network plus its oriented edges.
struct FlowModel {
  std::shared_ptr<const Network> network;  // owned copy
  FlowAssignment flows;
  std::vector<OrientedEdge> edges;

  const Network& net() const { return *network; }
};

/// Validates, computes flows and canonicalizes. Throws InputError when the
/// network is not admissible.
FlowModel make_flow_model(const Network& n);

/// Compression ratio of an oriented edge for the given squared pressures:
/// (beta_head + delta1) / (beta_tail - delta0). Infinity when the compressor
/// inlet pressure is not positive.
double ratio_from_pressures(const OrientedEdge& e, double beta_tail, double beta_head);

}  // namespace ogf
