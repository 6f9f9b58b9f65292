#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "uowsn/completion.hpp"
#include "uowsn/netgraph.hpp"
#include "uowsn/rng.hpp"

namespace uowsn::localization {

/// Noisy pairwise ranges. values(i, j) is the range measured on the link
/// i -> j; when only one direction exists the draw is mirrored. Unobserved
/// entries are NaN and masked out. The diagonal is 0 and observed.
struct ObservedDistanceMatrix {
  Eigen::MatrixXd values;
  BoolMatrix mask;

  Eigen::Index size() const { return values.rows(); }
  /// Average of both directions; unobserved entries stay NaN.
  Eigen::MatrixXd symmetrized() const;
};

/// Smallest range ever reported, in meters.
inline constexpr double kMinObservedRange = 1e-6;

/// Observes every pair with a link in either direction. Each directed link
/// gets its own N(0, (noise_pct * d)^2) draw, clipped below at
/// kMinObservedRange.
ObservedDistanceMatrix observe_distances(const netgraph::DirectedSectorGraph& g,
                                         double noise_pct, Rng& rng);

/// Missing-entry initialization: shortest paths through the observed ranges;
/// pairs with no path get the largest observed range.
Eigen::MatrixXd shortest_path_fill(const ObservedDistanceMatrix& obs);

/// Completes the squared-distance matrix at `options.rank`, starting from the
/// squared shortest-path fill. The result holds squared distances.
CompletionResult complete_matrix(const ObservedDistanceMatrix& obs,
                                 const CompletionOptions& options = {});

struct Embedding {
  Eigen::MatrixXd coords;  // M x dims, centered
  /// Fewer than `dims` positive eigenvalues; the missing axes are zero.
  bool degenerate = false;
};

/// Classical MDS: double-center the squared distances and keep the top `dims`
/// eigenpairs as E * sqrt(Lambda). The input is symmetrized first.
Embedding mds_embed(const Eigen::MatrixXd& distances, Eigen::Index dims = 2);

struct SimilarityTransform {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();
  double scale = 1.0;

  /// rotation * scale * p + translation, row by row.
  Eigen::MatrixX2d apply(const Eigen::MatrixX2d& points) const;
};

struct ProcrustesOptions {
  /// Accept an improper orthogonal factor when it strictly lowers the residual.
  bool allow_reflection = true;
};

struct ProcrustesResult {
  SimilarityTransform transform;
  /// Sum of squared anchor residuals after alignment.
  double objective = 0.0;
  bool reflected = false;
  /// Smallest singular value of the centered anchors < 1e-6 * largest.
  bool near_collinear = false;
};

/// Least-squares similarity transform taking `relative` onto `anchors_true`.
/// Needs k >= 3 rows; zero-spread relative coordinates throw.
ProcrustesResult procrustes_align(const Eigen::MatrixX2d& relative,
                                  const Eigen::MatrixX2d& anchors_true,
                                  const ProcrustesOptions& options = {});

struct AnchorSet {
  std::vector<std::size_t> indices;
  Eigen::MatrixX2d true_positions;
};

/// Anchors drawn uniformly without replacement; the first `count` entries of a
/// seeded permutation, so smaller sets are prefixes of larger ones.
AnchorSet choose_anchors(const netgraph::DirectedSectorGraph& g,
                         std::size_t count, Rng& rng);

enum class Method { kProposed, kMdsMap, kDvHop };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class RmseFormula {
  /// sqrt(sum of squared errors) / N
  kRootSumOverCount,
  /// sqrt(sum of squared errors / N)
  kConventional,
};

struct LocalizeOptions {
  CompletionOptions completion;
  ProcrustesOptions procrustes;
  RmseFormula rmse = RmseFormula::kRootSumOverCount;
};

struct LocalizationResult {
  /// Anchors keep their true positions. Unlocalized nodes are parked at the
  /// anchor centroid and flagged false in `localized`.
  Eigen::MatrixX2d estimated_positions;
  double rmse = 0.0;
  /// Completion iterations and relative residual; 0 for the baselines.
  int iterations = 0;
  double completion_residual = 0.0;
  bool converged = true;
  std::size_t unlocalized = 0;
  std::vector<bool> localized;
};

/// RMSE over the rows flagged in `scored`, N = number of flagged rows; 0 when
/// nothing is scored.
double localization_rmse(const Eigen::MatrixX2d& truth,
                         const Eigen::MatrixX2d& estimate,
                         const std::vector<bool>& scored, RmseFormula formula);

/// Localizes every node with a path to some anchor over the observed pairs;
/// the rest are counted in `unlocalized` and left out of the RMSE, as are the
/// anchors themselves. Needs at least 3 anchors.
LocalizationResult localize(const netgraph::DirectedSectorGraph& g,
                            const ObservedDistanceMatrix& obs,
                            const AnchorSet& anchors, Method method,
                            const LocalizeOptions& options = {});

}  // namespace uowsn::localization
