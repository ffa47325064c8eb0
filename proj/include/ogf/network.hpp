#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ogf {

/// Pascal per pound-force per square inch.
inline constexpr double kPascalPerPsi = 6894.757293168;

inline double psi_to_pascal(double psi) { return psi * kPascalPerPsi; }
inline double pascal_to_psi(double pa) { return pa / kPascalPerPsi; }

/// Thrown for malformed or inconsistent input data. `path` locates the
/// offending field (JSON path for parsed documents, field name otherwise).
class InputError : public std::runtime_error {
 public:
  InputError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : message + " at " + path),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Node {
  std::string id;
  double injection = 0.0;  // kg/s, positive = supply
  double beta_min = 0.0;   // Pa^2
  double beta_max = 0.0;   // Pa^2
  std::optional<double> milepost_km;
};

struct PipeParams {
  double friction = 0.0;
  double compressibility = 0.0;
  double gas_constant = 0.0;  // J/(kg K)
  double temperature = 0.0;   // K
  double length = 0.0;        // m
  double diameter = 0.0;      // m
};

struct Compressor {
  double position = 0.5;  // relative location along the edge, in [0,1]
  double alpha_max = 1.0;
  double cost_coeff = 1.0;
  double efficiency = 1.0;
  double exponent = (1.4 - 1.0) / 1.4;  // m = (gamma - 1) / gamma
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double drop_constant = 0.0;  // a = fZRTL/D
  std::optional<PipeParams> pipe;
  std::optional<Compressor> compressor;

  bool has_compressor() const { return compressor.has_value(); }
  double position() const { return compressor ? compressor->position : 0.0; }
  double alpha_max() const { return compressor ? compressor->alpha_max : 1.0; }
};

enum class RootPolicy { kPinnedToBetaMax, kPinnedToValue, kFree };

struct Network {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::size_t root = 0;
  RootPolicy root_policy = RootPolicy::kPinnedToBetaMax;
  double root_beta = 0.0;  // used only with kPinnedToValue

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  /// Index of the node with the given id, or nullopt.
  std::optional<std::size_t> find_node(const std::string& id) const;

  /// Squared pressure the root is held at under the current policy; for
  /// kFree this is the root's upper bound.
  double pinned_root_beta() const;
};

/// a = f Z R T L / D. Throws InputError naming the first non-positive field.
double pipe_drop_constant(const PipeParams& p);

struct ValidationIssue {
  enum class Kind {
    kCycle,
    kDisconnected,
    kUnbalanced,
    kBoundInversion,
    kDuplicateId,
    kBadReference,
    kBadEdgeParameter,
    kBadRoot,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(ValidationIssue::Kind kind) const;
  std::string summary() const;
};

/// Default tolerance on |sum q|: 1e-9 * max(1, max |q_i|).
double default_balance_tolerance(const Network& n);

ValidationReport validate(const Network& n);
ValidationReport validate(const Network& n, double balance_tol);

/// Parent/child structure of the tree hanging from `root`. Children are kept
/// in edge-index order unless every child of a node carries a milepost, in
/// which case they are sorted by milepost.
struct RootedTree {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t root = 0;
  std::vector<std::size_t> parent;       // kNone for the root
  std::vector<std::size_t> parent_edge;  // kNone for the root
  std::vector<std::vector<std::size_t>> child_edges;
  std::vector<std::size_t> preorder;  // parents before children

  /// Node on the far side of edge `e` as seen from `node`.
  static std::size_t other_end(const Edge& e, std::size_t node) {
    return e.from == node ? e.to : e.from;
  }
};

/// Requires a validated network (connected, acyclic).
RootedTree build_rooted_tree(const Network& n, std::size_t root);

}  // namespace ogf
