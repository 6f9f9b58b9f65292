#pragma once

#include <vector>

#include <Eigen/Dense>

#include "uowsn/netgraph.hpp"

namespace uowsn::localization {

using netgraph::BoolMatrix;

/// A point on the manifold of rank-r matrices, X = U diag(s) V^T with
/// orthonormal U, V.
struct FixedRankPoint {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd V;

  Eigen::MatrixXd dense() const { return U * s.asDiagonal() * V.transpose(); }
  Eigen::Index rank() const { return s.size(); }

  /// Best rank-r approximation of a dense matrix.
  static FixedRankPoint truncate(const Eigen::MatrixXd& A, Eigen::Index rank);
};

/// Orthogonal projection onto the tangent space at x:
/// P(Z) = U U^T Z + Z V V^T - U U^T Z V V^T.
Eigen::MatrixXd project_tangent(const FixedRankPoint& x, const Eigen::MatrixXd& Z);

/// Metric projection retraction R_x(step * T) for a tangent vector T, computed
/// through a 2r x 2r SVD.
FixedRankPoint retract(const FixedRankPoint& x, const Eigen::MatrixXd& T,
                       double step);

/// f(X) = 1/2 || mask o (X - target) ||_F^2
double masked_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& target,
                        const BoolMatrix& mask);
/// Euclidean gradient of masked_objective: mask o (X - target).
Eigen::MatrixXd masked_gradient(const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& target,
                                const BoolMatrix& mask);

struct CompletionOptions {
  /// z + 2 for points in z dimensions.
  Eigen::Index rank = 4;
  int max_iters = 500;
  /// Stop once ||mask o (X - target)|| / ||mask o target|| drops below this.
  double tol = 1e-6;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct CompletionResult {
  Eigen::MatrixXd matrix;
  double residual = 0.0;  // relative masked residual
  int iterations = 0;
  bool converged = false;
  /// Fewer observed entries than M^1.2 * rank * log(M).
  bool below_sample_guidance = false;
  /// Objective after each accepted step, starting with the initial point.
  std::vector<double> objective_history;
};

/// Riemannian conjugate gradient for the rank-constrained masked least
/// squares problem, started from the rank truncation of `initial`.
CompletionResult complete_low_rank(const Eigen::MatrixXd& target,
                                   const BoolMatrix& mask,
                                   const Eigen::MatrixXd& initial,
                                   const CompletionOptions& options = {});

}  // namespace uowsn::localization
