#include "uowsn/completion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace uowsn::localization {

namespace {

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& A) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
}

}  // namespace

FixedRankPoint FixedRankPoint::truncate(const Eigen::MatrixXd& A,
                                        Eigen::Index rank) {
  if (rank < 1 || rank > std::min(A.rows(), A.cols())) {
    throw std::invalid_argument("truncate: rank out of range");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return FixedRankPoint{svd.matrixU().leftCols(rank),
                        svd.singularValues().head(rank),
                        svd.matrixV().leftCols(rank)};
}

Eigen::MatrixXd project_tangent(const FixedRankPoint& x,
                                const Eigen::MatrixXd& Z) {
  const Eigen::MatrixXd UtZ = x.U.transpose() * Z;
  const Eigen::MatrixXd ZV = Z * x.V;
  const Eigen::MatrixXd UtZV = UtZ * x.V;
  return x.U * UtZ + ZV * x.V.transpose() - x.U * UtZV * x.V.transpose();
}

FixedRankPoint retract(const FixedRankPoint& x, const Eigen::MatrixXd& T,
                       double step) {
  const Eigen::Index r = x.rank();
  // T = U K V^T + Up V^T + U Vp^T with Up ⟂ U, Vp ⟂ V.
  const Eigen::MatrixXd TV = T * x.V;
  const Eigen::MatrixXd TtU = T.transpose() * x.U;
  const Eigen::MatrixXd K = x.U.transpose() * TV;
  const Eigen::MatrixXd Up = TV - x.U * K;
  const Eigen::MatrixXd Vp = TtU - x.V * K.transpose();

  const Eigen::MatrixXd Qu = thin_q(Up);
  const Eigen::MatrixXd Ru = Qu.transpose() * Up;
  const Eigen::MatrixXd Qv = thin_q(Vp);
  const Eigen::MatrixXd Rv = Qv.transpose() * Vp;

  Eigen::MatrixXd core = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  core.topLeftCorner(r, r) = Eigen::MatrixXd(x.s.asDiagonal()) + step * K;
  core.topRightCorner(r, r) = step * Rv.transpose();
  core.bottomLeftCorner(r, r) = step * Ru;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(core,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd left(x.U.rows(), 2 * r);
  left << x.U, Qu;
  Eigen::MatrixXd right(x.V.rows(), 2 * r);
  right << x.V, Qv;
  return FixedRankPoint{left * svd.matrixU().leftCols(r),
                        svd.singularValues().head(r),
                        right * svd.matrixV().leftCols(r)};
}

double masked_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& target,
                        const BoolMatrix& mask) {
  return 0.5 * mask.select(X - target, 0.0).squaredNorm();
}

Eigen::MatrixXd masked_gradient(const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& target,
                                const BoolMatrix& mask) {
  return mask.select(X - target, 0.0);
}

CompletionResult complete_low_rank(const Eigen::MatrixXd& target,
                                   const BoolMatrix& mask,
                                   const Eigen::MatrixXd& initial,
                                   const CompletionOptions& options) {
  const Eigen::Index M = target.rows();
  if (target.cols() != M || mask.rows() != M || mask.cols() != M ||
      initial.rows() != M || initial.cols() != M) {
    throw std::invalid_argument("complete_low_rank: shape mismatch");
  }
  const Eigen::Index rank = std::min(options.rank, M);

  CompletionResult result;
  const double observed = static_cast<double>(mask.count());
  const double m = static_cast<double>(M);
  result.below_sample_guidance =
      M > 1 && observed < std::pow(m, 1.2) * static_cast<double>(rank) * std::log(m);

  // Unobserved target entries may hold sentinels; keep them out of the algebra.
  const Eigen::MatrixXd clean_target = mask.select(target, 0.0);
  const double target_norm = clean_target.norm();
  const double scale = target_norm > 0.0 ? target_norm : 1.0;

  FixedRankPoint x = FixedRankPoint::truncate(initial, rank);
  Eigen::MatrixXd X = x.dense();
  Eigen::MatrixXd residual = masked_gradient(X, clean_target, mask);
  double f = 0.5 * residual.squaredNorm();
  result.objective_history.push_back(f);

  Eigen::MatrixXd grad = project_tangent(x, residual);
  Eigen::MatrixXd direction = -grad;
  double grad_sq = grad.squaredNorm();

  int it = 0;
  for (; it < options.max_iters; ++it) {
    if (std::sqrt(2.0 * f) / scale < options.tol) {
      result.converged = true;
      break;
    }
    double slope = inner(grad, direction);
    if (!(slope < 0.0)) {
      direction = -grad;
      slope = -grad_sq;
    }
    if (slope == 0.0) break;

    // Exact minimizer of the objective along the linearized path.
    const Eigen::MatrixXd masked_dir = mask.select(direction, 0.0);
    const double curvature = masked_dir.squaredNorm();
    double step = curvature > 0.0 ? -slope / curvature : 1.0;

    bool accepted = false;
    FixedRankPoint candidate;
    Eigen::MatrixXd candidate_X, candidate_residual;
    double candidate_f = f;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      candidate = retract(x, direction, step);
      candidate_X = candidate.dense();
      candidate_residual = masked_gradient(candidate_X, clean_target, mask);
      candidate_f = 0.5 * candidate_residual.squaredNorm();
      if (candidate_f <= f + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::MatrixXd old_grad_moved = project_tangent(candidate, grad);
    const Eigen::MatrixXd old_dir_moved = project_tangent(candidate, direction);
    x = std::move(candidate);
    X = std::move(candidate_X);
    residual = std::move(candidate_residual);
    const double f_prev = f;
    f = candidate_f;
    result.objective_history.push_back(f);

    grad = project_tangent(x, residual);
    const double new_grad_sq = grad.squaredNorm();
    // Polak-Ribiere with restart.
    const double beta =
        grad_sq > 0.0
            ? std::max(0.0, inner(grad, grad - old_grad_moved) / grad_sq)
            : 0.0;
    grad_sq = new_grad_sq;
    direction = -grad + beta * old_dir_moved;

    if (f_prev - f <= 1e-15 * f_prev && f > 0.0) {
      ++it;
      break;
    }
  }
  if (!result.converged && std::sqrt(2.0 * f) / scale < options.tol) {
    result.converged = true;
  }

  result.iterations = it;
  result.residual = std::sqrt(2.0 * f) / scale;
  result.matrix = 0.5 * (X + X.transpose());
  return result;
}

}  // namespace uowsn::localization
