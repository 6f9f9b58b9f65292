#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "uowsn/localization.hpp"

namespace uowsn::localization {

Embedding mds_embed(const Eigen::MatrixXd& distances, Eigen::Index dims) {
  const Eigen::Index M = distances.rows();
  if (distances.cols() != M) throw std::invalid_argument("mds_embed: D must be square");
  if (dims < 1 || dims > M) throw std::invalid_argument("mds_embed: bad dims");

  const Eigen::MatrixXd D = 0.5 * (distances + distances.transpose());
  const Eigen::MatrixXd S = D.array().square().matrix();
  // -1/2 J S J without forming J: subtract row and column means, add back the
  // grand mean.
  const Eigen::VectorXd row_mean = S.rowwise().mean();
  const Eigen::RowVectorXd col_mean = S.colwise().mean();
  const double grand = S.mean();
  Eigen::MatrixXd C = S;
  C.colwise() -= row_mean;
  C.rowwise() -= col_mean;
  C.array() += grand;
  C *= -0.5;
  C = 0.5 * (C + C.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("mds_embed: eigendecomposition failed");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const double top = std::max(std::abs(values(M - 1)), std::abs(values(0)));
  const double floor = top * static_cast<double>(M) *
                       std::numeric_limits<double>::epsilon();

  Embedding out;
  out.coords = Eigen::MatrixXd::Zero(M, dims);
  for (Eigen::Index k = 0; k < dims; ++k) {
    const double lambda = values(M - 1 - k);
    if (lambda > floor) {
      out.coords.col(k) = eig.eigenvectors().col(M - 1 - k) * std::sqrt(lambda);
    } else {
      out.degenerate = true;
    }
  }
  out.coords.rowwise() -= out.coords.colwise().mean();
  return out;
}

}  // namespace uowsn::localization
