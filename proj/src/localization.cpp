#include "uowsn/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace uowsn::localization {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

BoolMatrix off_diagonal(const BoolMatrix& mask) {
  BoolMatrix adj = mask;
  adj.matrix().diagonal().setConstant(false);
  return adj;
}

// Nodes with a path to at least one anchor over the observed pairs, in
// ascending order.
std::vector<std::size_t> anchor_component(const BoolMatrix& links,
                                          const std::vector<std::size_t>& anchors) {
  const auto M = static_cast<std::size_t>(links.rows());
  std::vector<bool> seen(M, false);
  for (std::size_t a : anchors) {
    if (seen[a]) continue;
    const auto hops = netgraph::hop_counts(links, a);
    for (std::size_t i = 0; i < M; ++i) {
      if (hops[i] >= 0) seen[i] = true;
    }
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < M; ++i) {
    if (seen[i]) members.push_back(i);
  }
  return members;
}

ObservedDistanceMatrix restrict(const ObservedDistanceMatrix& obs,
                                const std::vector<std::size_t>& keep) {
  const auto n = static_cast<Eigen::Index>(keep.size());
  ObservedDistanceMatrix sub;
  sub.values.resize(n, n);
  sub.mask.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto i = static_cast<Eigen::Index>(keep[a]);
      const auto j = static_cast<Eigen::Index>(keep[b]);
      sub.values(a, b) = obs.values(i, j);
      sub.mask(a, b) = obs.mask(i, j);
    }
  }
  return sub;
}

// Relative coordinates of the restricted node set, aligned onto the anchors.
Eigen::MatrixX2d align(const Eigen::MatrixXd& distances,
                       const std::vector<Eigen::Index>& anchor_rows,
                       const AnchorSet& anchors, const ProcrustesOptions& opts) {
  const Embedding emb = mds_embed(distances, 2);
  const Eigen::MatrixX2d relative = emb.coords;
  Eigen::MatrixX2d rel_anchors(static_cast<Eigen::Index>(anchor_rows.size()), 2);
  for (std::size_t a = 0; a < anchor_rows.size(); ++a) {
    rel_anchors.row(static_cast<Eigen::Index>(a)) = relative.row(anchor_rows[a]);
  }
  const auto fit = procrustes_align(rel_anchors, anchors.true_positions, opts);
  return fit.transform.apply(relative);
}

// Linearized lateration: subtracting the last anchor's circle equation from
// the others leaves a linear system in (x, y).
std::optional<Eigen::Vector2d> laterate(const Eigen::MatrixX2d& anchor_pos,
                                        const Eigen::VectorXd& ranges) {
  const Eigen::Index n = anchor_pos.rows();
  if (n < 3) return std::nullopt;
  const Eigen::RowVector2d last = anchor_pos.row(n - 1);
  Eigen::MatrixX2d A(n - 1, 2);
  Eigen::VectorXd b(n - 1);
  for (Eigen::Index a = 0; a < n - 1; ++a) {
    const Eigen::RowVector2d p = anchor_pos.row(a);
    A.row(a) = 2.0 * (p - last);
    b(a) = p.squaredNorm() - last.squaredNorm() - ranges(a) * ranges(a) +
           ranges(n - 1) * ranges(n - 1);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixX2d> qr(A);
  if (qr.rank() < 2) return std::nullopt;
  return Eigen::Vector2d(qr.solve(b));
}

}  // namespace

Eigen::MatrixXd ObservedDistanceMatrix::symmetrized() const {
  const Eigen::MatrixXd filled = mask.select(values, 0.0);
  return mask.select(0.5 * (filled + filled.transpose()), kNaN);
}

ObservedDistanceMatrix observe_distances(const netgraph::DirectedSectorGraph& g,
                                         double noise_pct, Rng& rng) {
  if (!(noise_pct >= 0.0)) throw std::domain_error("noise_pct must be >= 0");
  const auto M = static_cast<Eigen::Index>(g.size());
  ObservedDistanceMatrix obs;
  obs.values = Eigen::MatrixXd::Constant(M, M, kNaN);
  obs.mask = BoolMatrix::Constant(M, M, false);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (i == j || !g.has_edge(i, j)) continue;
      const double d = g.distance(i, j);
      const double eta = noise_pct > 0.0 ? noise_pct * d * noise(rng) : 0.0;
      obs.values(i, j) = std::max(kMinObservedRange, d + eta);
      obs.mask(i, j) = true;
    }
  }
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (obs.mask(i, j) && !obs.mask(j, i)) {
        obs.values(j, i) = obs.values(i, j);
        obs.mask(j, i) = true;
      }
    }
    obs.values(i, i) = 0.0;
    obs.mask(i, i) = true;
  }
  return obs;
}

Eigen::MatrixXd shortest_path_fill(const ObservedDistanceMatrix& obs) {
  const Eigen::MatrixXd sym = obs.symmetrized();
  Eigen::MatrixXd weights = obs.mask.select(sym, kInf);
  weights.diagonal().setZero();
  Eigen::MatrixXd paths = netgraph::all_pairs_shortest_paths(weights);

  const BoolMatrix observed = off_diagonal(obs.mask);
  const double largest =
      observed.any() ? observed.select(sym, 0.0).maxCoeff() : 0.0;
  paths = (paths.array() == kInf).select(largest, paths);
  // Observed pairs keep their own measurement; the graph only fills holes.
  Eigen::MatrixXd out = obs.mask.select(sym, paths);
  out.diagonal().setZero();
  return 0.5 * (out + out.transpose());
}

CompletionResult complete_matrix(const ObservedDistanceMatrix& obs,
                                 const CompletionOptions& options) {
  const Eigen::MatrixXd sym = obs.symmetrized();
  const Eigen::MatrixXd target = obs.mask.select(sym.array().square().matrix(), 0.0);
  const Eigen::MatrixXd initial = shortest_path_fill(obs).array().square().matrix();
  return complete_low_rank(target, obs.mask, initial, options);
}

AnchorSet choose_anchors(const netgraph::DirectedSectorGraph& g,
                         std::size_t count, Rng& rng) {
  const std::size_t M = g.size();
  if (count < 3 || count > M) {
    throw std::domain_error("choose_anchors: need 3 <= count <= node count");
  }
  // Fisher-Yates on uniform01 so the draw is identical on every platform.
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i + 1 < M; ++i) {
    const auto span = static_cast<double>(M - i);
    const std::size_t j =
        i + std::min(static_cast<std::size_t>(uniform01(rng) * span), M - i - 1);
    std::swap(order[i], order[j]);
  }
  AnchorSet out;
  out.indices.assign(order.begin(), order.begin() + static_cast<long>(count));
  out.true_positions.resize(static_cast<Eigen::Index>(count), 2);
  for (std::size_t a = 0; a < count; ++a) {
    out.true_positions.row(static_cast<Eigen::Index>(a)) =
        g.node(out.indices[a]).coords.transpose();
  }
  return out;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kProposed: return "proposed";
    case Method::kMdsMap: return "mds_map";
    case Method::kDvHop: return "dv_hop";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::kProposed, Method::kMdsMap, Method::kDvHop}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

double localization_rmse(const Eigen::MatrixX2d& truth,
                         const Eigen::MatrixX2d& estimate,
                         const std::vector<bool>& scored, RmseFormula formula) {
  if (truth.rows() != estimate.rows() ||
      static_cast<std::size_t>(truth.rows()) != scored.size()) {
    throw std::invalid_argument("localization_rmse: size mismatch");
  }
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!scored[i]) continue;
    const auto r = static_cast<Eigen::Index>(i);
    sse += (truth.row(r) - estimate.row(r)).squaredNorm();
    ++n;
  }
  if (n == 0) return 0.0;
  const double count = static_cast<double>(n);
  return formula == RmseFormula::kConventional ? std::sqrt(sse / count)
                                               : std::sqrt(sse) / count;
}

LocalizationResult localize(const netgraph::DirectedSectorGraph& g,
                            const ObservedDistanceMatrix& obs,
                            const AnchorSet& anchors, Method method,
                            const LocalizeOptions& options) {
  const std::size_t M = g.size();
  if (static_cast<std::size_t>(obs.size()) != M ||
      static_cast<std::size_t>(obs.mask.rows()) != M) {
    throw std::invalid_argument("localize: observation size differs from graph");
  }
  const std::size_t k = anchors.indices.size();
  if (k < 3) throw std::domain_error("localize needs at least 3 anchors");
  if (static_cast<std::size_t>(anchors.true_positions.rows()) != k) {
    throw std::invalid_argument("localize: anchor positions do not match indices");
  }
  std::vector<bool> is_anchor(M, false);
  for (std::size_t a : anchors.indices) {
    if (a >= M) throw std::out_of_range("localize: anchor index out of range");
    if (is_anchor[a]) throw std::invalid_argument("localize: repeated anchor");
    is_anchor[a] = true;
  }

  const BoolMatrix links = off_diagonal(obs.mask);
  const Eigen::RowVector2d anchor_centroid = anchors.true_positions.colwise().mean();

  LocalizationResult out;
  out.estimated_positions = anchor_centroid.replicate(static_cast<Eigen::Index>(M), 1);
  out.localized.assign(M, false);

  if (method == Method::kDvHop) {
    std::vector<std::vector<int>> hops(k);
    for (std::size_t a = 0; a < k; ++a) hops[a] = netgraph::hop_counts(links, anchors.indices[a]);

    // Average hop length seen by each anchor from the other anchors.
    std::vector<double> hop_length(k, kNaN);
    for (std::size_t a = 0; a < k; ++a) {
      double dist_sum = 0.0;
      long hop_sum = 0;
      for (std::size_t b = 0; b < k; ++b) {
        const int h = hops[a][anchors.indices[b]];
        if (b == a || h <= 0) continue;
        dist_sum += (anchors.true_positions.row(static_cast<Eigen::Index>(a)) -
                     anchors.true_positions.row(static_cast<Eigen::Index>(b)))
                        .norm();
        hop_sum += h;
      }
      if (hop_sum > 0) hop_length[a] = dist_sum / static_cast<double>(hop_sum);
    }

    for (std::size_t i = 0; i < M; ++i) {
      if (is_anchor[i]) continue;
      std::vector<std::size_t> reach;
      std::size_t nearest = k;
      for (std::size_t a = 0; a < k; ++a) {
        if (hops[a][i] < 0) continue;
        reach.push_back(a);
        if (!std::isnan(hop_length[a]) &&
            (nearest == k || hops[a][i] < hops[nearest][i])) {
          nearest = a;
        }
      }
      if (reach.size() < 3 || nearest == k) continue;
      Eigen::MatrixX2d pos(static_cast<Eigen::Index>(reach.size()), 2);
      Eigen::VectorXd ranges(static_cast<Eigen::Index>(reach.size()));
      for (std::size_t r = 0; r < reach.size(); ++r) {
        pos.row(static_cast<Eigen::Index>(r)) =
            anchors.true_positions.row(static_cast<Eigen::Index>(reach[r]));
        ranges(static_cast<Eigen::Index>(r)) =
            hop_length[nearest] * static_cast<double>(hops[reach[r]][i]);
      }
      if (const auto p = laterate(pos, ranges)) {
        out.estimated_positions.row(static_cast<Eigen::Index>(i)) = p->transpose();
        out.localized[i] = true;
      }
    }
  } else {
    const auto members = anchor_component(links, anchors.indices);
    std::vector<Eigen::Index> anchor_rows(k);
    for (std::size_t a = 0; a < k; ++a) {
      const auto it = std::lower_bound(members.begin(), members.end(),
                                       anchors.indices[a]);
      anchor_rows[a] = static_cast<Eigen::Index>(it - members.begin());
    }
    const ObservedDistanceMatrix sub = restrict(obs, members);

    Eigen::MatrixXd distances;
    if (method == Method::kProposed) {
      const CompletionResult completion = complete_matrix(sub, options.completion);
      distances = completion.matrix.cwiseMax(0.0).cwiseSqrt();
      out.iterations = completion.iterations;
      out.completion_residual = completion.residual;
      out.converged = completion.converged;
    } else {
      distances = shortest_path_fill(sub);
    }
    const Eigen::MatrixX2d placed =
        align(distances, anchor_rows, anchors, options.procrustes);
    for (std::size_t r = 0; r < members.size(); ++r) {
      out.estimated_positions.row(static_cast<Eigen::Index>(members[r])) =
          placed.row(static_cast<Eigen::Index>(r));
      out.localized[members[r]] = true;
    }
  }

  for (std::size_t a = 0; a < k; ++a) {
    out.estimated_positions.row(static_cast<Eigen::Index>(anchors.indices[a])) =
        anchors.true_positions.row(static_cast<Eigen::Index>(a));
    out.localized[anchors.indices[a]] = true;
  }

  std::vector<bool> scored(M, false);
  for (std::size_t i = 0; i < M; ++i) {
    if (is_anchor[i]) continue;
    if (out.localized[i]) {
      scored[i] = true;
    } else {
      ++out.unlocalized;
    }
  }
  out.rmse = localization_rmse(g.positions(), out.estimated_positions, scored,
                               options.rmse);
  return out;
}

}  // namespace uowsn::localization
