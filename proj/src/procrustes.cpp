#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "uowsn/localization.hpp"

namespace uowsn::localization {

Eigen::MatrixX2d SimilarityTransform::apply(const Eigen::MatrixX2d& points) const {
  Eigen::MatrixX2d out = scale * points * rotation.transpose();
  out.rowwise() += translation.transpose();
  return out;
}

ProcrustesResult procrustes_align(const Eigen::MatrixX2d& relative,
                                  const Eigen::MatrixX2d& anchors_true,
                                  const ProcrustesOptions& options) {
  const Eigen::Index k = relative.rows();
  if (anchors_true.rows() != k) {
    throw std::invalid_argument("procrustes_align: row count mismatch");
  }
  if (k < 3) throw std::domain_error("procrustes_align needs at least 3 anchors");

  const Eigen::RowVector2d mean_rel = relative.colwise().mean();
  const Eigen::RowVector2d mean_true = anchors_true.colwise().mean();
  const Eigen::MatrixX2d X = relative.rowwise() - mean_rel;
  const Eigen::MatrixX2d Y = anchors_true.rowwise() - mean_true;
  const double spread = X.squaredNorm();
  if (!(spread > 0.0)) {
    throw std::domain_error("procrustes_align: relative coordinates have no spread");
  }

  ProcrustesResult out;
  const Eigen::JacobiSVD<Eigen::MatrixX2d> anchor_svd(Y);
  const Eigen::Vector2d anchor_sv = anchor_svd.singularValues();
  out.near_collinear = anchor_sv(1) < 1e-6 * anchor_sv(0);

  // Cross-covariance Y^T X = U diag(sigma) V^T; the optimal orthogonal factor
  // is U V^T, or U diag(1, -1) V^T when it must stay a proper rotation.
  const Eigen::Matrix2d cross = Y.transpose() * X;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d U = svd.matrixU();
  const Eigen::Matrix2d V = svd.matrixV();
  const Eigen::Vector2d sigma = svd.singularValues();

  Eigen::Vector2d signs(1.0, 1.0);
  const bool improper = (U.determinant() * V.determinant()) < 0.0;
  // With sigma_2 = 0 both factors give the same residual, so only a strict
  // gain justifies the reflection.
  const bool reflection_helps = sigma(1) > 1e-15 * sigma(0);
  if (improper && !(options.allow_reflection && reflection_helps)) {
    signs(1) = -1.0;
  }
  out.transform.rotation = U * signs.asDiagonal() * V.transpose();
  out.reflected = out.transform.rotation.determinant() < 0.0;
  out.transform.scale = sigma.dot(signs) / spread;
  out.transform.translation =
      mean_true.transpose() -
      out.transform.scale * out.transform.rotation * mean_rel.transpose();
  out.objective = (out.transform.apply(relative) - anchors_true).squaredNorm();
  return out;
}

}  // namespace uowsn::localization
