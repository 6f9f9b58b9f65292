#include "uowsn/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

namespace uowsn::netgraph {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_coordinate(double d, double side) {
  d = std::fmod(d, side);
  if (d > 0.5 * side) d -= side;
  if (d <= -0.5 * side) d += side;
  return d;
}

// Bucket nodes into square cells no smaller than the largest range so every
// candidate neighbour sits in one of the 3x3 surrounding cells.
class CellIndex {
 public:
  CellIndex(const std::vector<NodeSector>& nodes, double side, double reach,
            bool wrap)
      : side_(side), wrap_(wrap) {
    per_side_ = reach > 0.0 ? static_cast<int>(std::floor(side / reach)) : 1;
    per_side_ = std::clamp(per_side_, 1, 1024);
    cells_.resize(static_cast<std::size_t>(per_side_) * per_side_);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cells_[cell_of(nodes[i].coords)].push_back(i);
    }
  }

  bool usable() const { return per_side_ >= 3; }

  template <class Fn>
  void for_each_candidate(const Eigen::Vector2d& p, Fn&& fn) const {
    const int cx = axis_cell(p.x());
    const int cy = axis_cell(p.y());
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        int x = cx + dx;
        int y = cy + dy;
        if (wrap_) {
          x = (x + per_side_) % per_side_;
          y = (y + per_side_) % per_side_;
        } else if (x < 0 || y < 0 || x >= per_side_ || y >= per_side_) {
          continue;
        }
        for (std::size_t j : cells_[static_cast<std::size_t>(y) * per_side_ + x]) {
          fn(j);
        }
      }
    }
  }

 private:
  int axis_cell(double v) const {
    const int c = static_cast<int>(std::floor(v / side_ * per_side_));
    return std::clamp(c, 0, per_side_ - 1);
  }
  std::size_t cell_of(const Eigen::Vector2d& p) const {
    return static_cast<std::size_t>(axis_cell(p.y())) * per_side_ +
           axis_cell(p.x());
  }

  double side_;
  bool wrap_;
  int per_side_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a > std::numbers::pi) a -= kTwoPi;
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

double normalize_orientation(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

bool sector_contains_offset(const NodeSector& s, const Eigen::Vector2d& offset) {
  const double r2 = offset.squaredNorm();
  if (r2 == 0.0 || r2 > s.range * s.range) return false;
  if (s.scan_angle >= kTwoPi) return true;
  const double bearing = std::atan2(offset.y(), offset.x());
  return std::abs(wrap_angle(bearing - s.orientation)) <= 0.5 * s.scan_angle;
}

bool in_sector(const NodeSector& s, const Eigen::Vector2d& point) {
  return sector_contains_offset(s, point - s.coords);
}

DirectedSectorGraph::DirectedSectorGraph(std::vector<NodeSector> nodes,
                                         double area_side, BorderMode border)
    : nodes_(std::move(nodes)), area_side_(area_side), border_(border) {
  const auto M = nodes_.size();
  adjacency_ = BoolMatrix::Constant(M, M, false);
  double reach = 0.0;
  for (const auto& n : nodes_) reach = std::max(reach, n.range);

  const bool wrap = border_ == BorderMode::kTorus;
  const bool inside = std::all_of(nodes_.begin(), nodes_.end(), [&](const auto& n) {
    return n.coords.x() >= 0.0 && n.coords.y() >= 0.0 &&
           n.coords.x() < area_side_ && n.coords.y() < area_side_;
  });
  CellIndex index(nodes_, area_side_ > 0.0 ? area_side_ : 1.0, reach, wrap);
  for (std::size_t i = 0; i < M; ++i) {
    auto test = [&](std::size_t j) {
      if (j != i && sector_contains_offset(nodes_[i], offset(i, j))) {
        adjacency_(i, j) = true;
      }
    };
    if (inside && index.usable()) {
      index.for_each_candidate(nodes_[i].coords, test);
    } else {
      for (std::size_t j = 0; j < M; ++j) test(j);
    }
  }
}

DirectedSectorGraph::DirectedSectorGraph(std::vector<NodeSector> nodes,
                                         BoolMatrix adjacency, double area_side,
                                         BorderMode border)
    : nodes_(std::move(nodes)),
      adjacency_(std::move(adjacency)),
      area_side_(area_side),
      border_(border) {
  const auto M = static_cast<Eigen::Index>(nodes_.size());
  if (adjacency_.rows() != M || adjacency_.cols() != M) {
    throw std::invalid_argument("adjacency shape does not match node count");
  }
  for (Eigen::Index i = 0; i < M; ++i) {
    if (adjacency_(i, i)) throw std::invalid_argument("self-loop in adjacency");
  }
}

Eigen::Vector2d DirectedSectorGraph::offset(std::size_t i, std::size_t j) const {
  Eigen::Vector2d d = nodes_[j].coords - nodes_[i].coords;
  if (border_ == BorderMode::kTorus) {
    d.x() = wrap_coordinate(d.x(), area_side_);
    d.y() = wrap_coordinate(d.y(), area_side_);
  }
  return d;
}

double DirectedSectorGraph::distance(std::size_t i, std::size_t j) const {
  return offset(i, j).norm();
}

Eigen::MatrixX2d DirectedSectorGraph::positions() const {
  Eigen::MatrixX2d p(nodes_.size(), 2);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    p.row(static_cast<Eigen::Index>(i)) = nodes_[i].coords.transpose();
  }
  return p;
}

std::size_t DirectedSectorGraph::out_degree(std::size_t i) const {
  return static_cast<std::size_t>(adjacency_.row(i).count());
}

std::size_t DirectedSectorGraph::in_degree(std::size_t i) const {
  return static_cast<std::size_t>(adjacency_.col(i).count());
}

double DirectedSectorGraph::mean_out_degree() const {
  if (nodes_.empty()) return 0.0;
  return static_cast<double>(adjacency_.count()) /
         static_cast<double>(nodes_.size());
}

DirectedSectorGraph deploy(std::size_t M, double area_side, double scan_angle,
                           double range, Rng& rng, DeployOptions options) {
  if (!(area_side > 0.0)) throw std::domain_error("area_side must be > 0");
  if (!(scan_angle > 0.0 && scan_angle <= kTwoPi)) {
    throw std::domain_error("scan_angle must lie in (0, 2pi]");
  }
  if (!(range >= 0.0)) throw std::domain_error("range must be >= 0");
  if (options.poisson_count) {
    std::poisson_distribution<std::size_t> count(static_cast<double>(M));
    M = count(rng);
  } else if (M < 1) {
    throw std::domain_error("deploy needs M >= 1");
  }

  std::vector<NodeSector> nodes(M);
  for (auto& n : nodes) {
    n.coords.x() = area_side * uniform01(rng);
    n.coords.y() = area_side * uniform01(rng);
    n.orientation = kTwoPi * uniform01(rng);
    n.scan_angle = scan_angle;
    n.range = range;
  }
  return DirectedSectorGraph(std::move(nodes), area_side, options.border);
}

std::vector<std::size_t> descendants(const DirectedSectorGraph& g,
                                     std::size_t i) {
  if (i >= g.size()) throw std::out_of_range("descendants: bad node index");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.has_edge(i, j)) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> antecedents(const DirectedSectorGraph& g,
                                     std::size_t i) {
  if (i >= g.size()) throw std::out_of_range("antecedents: bad node index");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.has_edge(j, i)) out.push_back(j);
  }
  return out;
}

bool is_k_connected(const DirectedSectorGraph& g, std::size_t k) {
  if (k < 1) throw std::domain_error("is_k_connected needs k >= 1");
  const auto& adj = g.adjacency();
  const auto M = static_cast<Eigen::Index>(g.size());
  if (M == 0) return false;
  const Eigen::Index need = static_cast<Eigen::Index>(k);
  for (Eigen::Index i = 0; i < M; ++i) {
    if (adj.row(i).count() < need || adj.col(i).count() < need) return false;
  }
  return true;
}

Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols()) {
    throw std::invalid_argument("weights must be square");
  }
  const auto M = weights.rows();
  if ((weights.array() < 0.0).any()) {
    throw std::domain_error("shortest paths need non-negative weights");
  }

  // Dijkstra from every source; adjacency lists built once.
  std::vector<std::vector<std::pair<Eigen::Index, double>>> edges(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (i != j && std::isfinite(weights(i, j))) {
        edges[i].emplace_back(j, weights(i, j));
      }
    }
  }

  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(M, M, kInf);
  using Entry = std::pair<double, Eigen::Index>;
  for (Eigen::Index s = 0; s < M; ++s) {
    auto row = dist.row(s);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    row(s) = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > row(u)) continue;
      for (const auto& [v, w] : edges[u]) {
        const double nd = d + w;
        if (nd < row(v)) {
          row(v) = nd;
          heap.emplace(nd, v);
        }
      }
    }
  }
  return dist;
}

Eigen::MatrixXd shortest_path_distances(const DirectedSectorGraph& g,
                                        const Eigen::MatrixXd& weights) {
  const auto M = static_cast<Eigen::Index>(g.size());
  if (weights.rows() != M || weights.cols() != M) {
    throw std::invalid_argument("weights shape does not match graph");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(M, M, kInf);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (g.adjacency()(i, j)) {
        if (!std::isfinite(weights(i, j))) {
          throw std::domain_error("edge weight must be finite");
        }
        w(i, j) = weights(i, j);
      }
    }
  }
  return all_pairs_shortest_paths(w);
}

std::vector<int> hop_counts(const BoolMatrix& adjacency, std::size_t source) {
  const auto M = static_cast<std::size_t>(adjacency.rows());
  std::vector<int> hops(M, -1);
  if (source >= M) throw std::out_of_range("hop_counts: bad source");
  std::deque<std::size_t> queue{source};
  hops[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < M; ++v) {
      if (adjacency(u, v) && hops[v] < 0) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return hops;
}

void write_node_table(std::ostream& out, const std::vector<NodeSector>& nodes) {
  const auto old_precision = out.precision(17);
  out << "nodes " << nodes.size() << '\n';
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out << i << ' ' << n.coords.x() << ' ' << n.coords.y() << ' '
        << n.orientation << ' ' << n.scan_angle << ' ' << n.range << '\n';
  }
  out.precision(old_precision);
}

void write_graph(std::ostream& out, const DirectedSectorGraph& g) {
  const auto old_precision = out.precision(17);
  out << "uowsn-graph 1\n";
  out << "area_side " << g.area_side() << " border "
      << (g.border() == BorderMode::kTorus ? "torus" : "bounded") << '\n';
  write_node_table(out, g.nodes());
  out << "edges " << g.adjacency().count() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.has_edge(i, j)) out << i << ' ' << j << '\n';
    }
  }
  out.precision(old_precision);
}

DirectedSectorGraph read_graph(std::istream& in) {
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(in >> got) || got != word) {
      throw std::runtime_error("graph file: expected '" + word + "', got '" +
                               got + "'");
    }
  };
  expect("uowsn-graph");
  int version = 0;
  if (!(in >> version) || version != 1) {
    throw std::runtime_error("graph file: unsupported version");
  }
  double side = 0.0;
  std::string border_name;
  expect("area_side");
  in >> side;
  expect("border");
  in >> border_name;
  if (border_name != "bounded" && border_name != "torus") {
    throw std::runtime_error("graph file: unknown border '" + border_name + "'");
  }
  std::size_t M = 0;
  expect("nodes");
  if (!(in >> M)) throw std::runtime_error("graph file: bad node count");
  std::vector<NodeSector> nodes(M);
  for (std::size_t k = 0; k < M; ++k) {
    std::size_t i = 0;
    NodeSector n;
    if (!(in >> i >> n.coords.x() >> n.coords.y() >> n.orientation >>
          n.scan_angle >> n.range) ||
        i >= M) {
      throw std::runtime_error("graph file: bad node row " + std::to_string(k));
    }
    nodes[i] = n;
  }
  std::size_t E = 0;
  expect("edges");
  if (!(in >> E)) throw std::runtime_error("graph file: bad edge count");
  BoolMatrix adj = BoolMatrix::Constant(M, M, false);
  for (std::size_t e = 0; e < E; ++e) {
    std::size_t i = 0, j = 0;
    if (!(in >> i >> j) || i >= M || j >= M || i == j) {
      throw std::runtime_error("graph file: bad edge row " + std::to_string(e));
    }
    adj(i, j) = true;
  }
  return DirectedSectorGraph(std::move(nodes), std::move(adj), side,
                             border_name == "torus" ? BorderMode::kTorus
                                                    : BorderMode::kBounded);
}

}  // namespace uowsn::netgraph
