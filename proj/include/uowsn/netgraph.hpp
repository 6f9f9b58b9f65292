#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "uowsn/rng.hpp"

namespace uowsn::netgraph {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class BorderMode { kBounded, kTorus };

/// Coverage sector of one node: apex at `coords`, axis along `orientation`,
/// half-width scan_angle / 2 on each side, radius `range`.
struct NodeSector {
  Eigen::Vector2d coords = Eigen::Vector2d::Zero();
  double orientation = 0.0;  // [0, 2pi)
  double scan_angle = 0.0;   // (0, 2pi]
  double range = 0.0;        // > 0
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);
/// Wraps an angle into [0, 2pi).
double normalize_orientation(double a);

/// Sector membership of a point given as an offset from the sector apex.
/// Both the range and the angular bound are inclusive; a zero offset is never
/// a member.
bool sector_contains_offset(const NodeSector& s, const Eigen::Vector2d& offset);

/// True iff `point` lies in sector `s` (plain Euclidean plane).
bool in_sector(const NodeSector& s, const Eigen::Vector2d& point);

class DirectedSectorGraph {
 public:
  DirectedSectorGraph() = default;
  /// Builds the adjacency from sector membership. In torus mode offsets are
  /// taken modulo `area_side` on both axes.
  DirectedSectorGraph(std::vector<NodeSector> nodes, double area_side,
                      BorderMode border = BorderMode::kBounded);
  /// Wraps an explicit adjacency (fixtures, transformed copies). The diagonal
  /// must be false.
  DirectedSectorGraph(std::vector<NodeSector> nodes, BoolMatrix adjacency,
                      double area_side, BorderMode border);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeSector>& nodes() const { return nodes_; }
  const NodeSector& node(std::size_t i) const { return nodes_.at(i); }
  const BoolMatrix& adjacency() const { return adjacency_; }
  bool has_edge(std::size_t i, std::size_t j) const { return adjacency_(i, j); }
  double area_side() const { return area_side_; }
  BorderMode border() const { return border_; }

  /// Offset from node i to node j under the border mode.
  Eigen::Vector2d offset(std::size_t i, std::size_t j) const;
  double distance(std::size_t i, std::size_t j) const;
  /// M x 2 matrix of node coordinates.
  Eigen::MatrixX2d positions() const;

  std::size_t out_degree(std::size_t i) const;
  std::size_t in_degree(std::size_t i) const;
  double mean_out_degree() const;

 private:
  std::vector<NodeSector> nodes_;
  BoolMatrix adjacency_;
  double area_side_ = 0.0;
  BorderMode border_ = BorderMode::kBounded;
};

struct DeployOptions {
  BorderMode border = BorderMode::kBounded;
  /// Draw the node count from Poisson(M) instead of using M exactly.
  bool poisson_count = false;
};

/// Drops nodes i.i.d. uniform on [0, area_side]^2 with i.i.d. uniform
/// orientations; every node shares `scan_angle` and `range`.
DirectedSectorGraph deploy(std::size_t M, double area_side, double scan_angle,
                           double range, Rng& rng, DeployOptions options = {});

/// Out-neighbours {j : i -> j}, ascending.
std::vector<std::size_t> descendants(const DirectedSectorGraph& g,
                                     std::size_t i);
/// In-neighbours {j : j -> i}, ascending.
std::vector<std::size_t> antecedents(const DirectedSectorGraph& g,
                                     std::size_t i);

/// Degree-based k-connectivity: every node has at least k descendants and at
/// least k antecedents.
bool is_k_connected(const DirectedSectorGraph& g, std::size_t k);

/// All-pairs shortest directed path lengths over a weight matrix whose +inf
/// entries mean "no edge". Unreachable pairs stay +inf; the diagonal is 0.
/// Negative weights throw std::domain_error.
Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights);

/// Same, with edges restricted to the graph's adjacency.
Eigen::MatrixXd shortest_path_distances(const DirectedSectorGraph& g,
                                        const Eigen::MatrixXd& weights);

/// Unweighted hop counts from `source` over an adjacency; -1 when unreachable.
std::vector<int> hop_counts(const BoolMatrix& adjacency, std::size_t source);

/// Plain-text serialization:
///
///   uowsn-graph 1
///   area_side <L> border <bounded|torus>
///   nodes <M>
///   <i> <x> <y> <orientation> <scan_angle> <range>     (M lines)
///   edges <E>
///   <i> <j>                                           (E lines)
void write_graph(std::ostream& out, const DirectedSectorGraph& g);
DirectedSectorGraph read_graph(std::istream& in);

/// The `nodes` block of the format above, on its own (used for dumping
/// estimated positions).
void write_node_table(std::ostream& out, const std::vector<NodeSector>& nodes);

}  // namespace uowsn::netgraph
