#include "rng.hpp"

namespace qclab {

Mat ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.cnormal();
  return m;
}

Mat haar_unitary(Rng& rng, Eigen::Index dim) {
  return haar_isometry(rng, dim, dim);
}

Mat haar_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  require(rows >= cols, ErrorKind::invalid_argument,
          "isometry needs rows >= cols");
  Mat g = ginibre(rng, rows, cols);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(rows, cols);
  // Fix the phase of R's diagonal so the distribution is Haar.
  Mat r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

}  // namespace qclab
