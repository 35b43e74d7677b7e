#include "spectral.hpp"

#include <cmath>

namespace qclab {

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

EigSystem eig_hermitian(const Mat& m) {
  if (m.rows() == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es;
    es.computeDirect(m);
    return {es.eigenvalues(), es.eigenvectors()};
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  require(es.info() == Eigen::Success, ErrorKind::numerical,
          "hermitian eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

HermitianOperator::HermitianOperator(Mat m) : mat_(std::move(m)) {
  require(mat_.rows() == mat_.cols(), ErrorKind::validation,
          "operator matrix must be square");
  require(mat_.rows() > 0, ErrorKind::validation, "operator dim must be positive");
  const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  require(dev <= tol::hermitian * std::max(1.0, mat_.cwiseAbs().maxCoeff()),
          ErrorKind::validation,
          "matrix is not Hermitian (deviation " + std::to_string(dev) + ")");
  mat_ = hermitize(mat_);
}

PositiveOperator::PositiveOperator(Mat m) : HermitianOperator(std::move(m)) {
  auto es = eig_hermitian(mat_);
  const double scale = std::max(1.0, std::abs(es.values(es.values.size() - 1)));
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    require(es.values(i) >= -tol::eig_clamp * scale, ErrorKind::validation,
            "operator has negative eigenvalue " + std::to_string(es.values(i)));
    if (es.values(i) < 0) es.values(i) = 0;
  }
  spectrum_ = std::move(es.values);
  eigenvectors_ = std::move(es.vectors);
}

DensityMatrix::DensityMatrix(Mat m) : DensityMatrix(PositiveOperator(std::move(m))) {}

DensityMatrix::DensityMatrix(PositiveOperator op) : PositiveOperator(std::move(op)) {
  require(std::abs(trace() - 1.0) <= tol::trace_one, ErrorKind::validation,
          "density matrix trace " + std::to_string(trace()) + " is not 1");
}

double entropy(const PositiveOperator& s) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.spectrum().size(); ++i) h += eta(s.spectrum()(i));
  return h;
}

double entropy_of(const Mat& m) { return entropy(PositiveOperator(m)); }

double relative_entropy(const PositiveOperator& sigma,
                        const PositiveOperator& varsigma) {
  require(sigma.dim() == varsigma.dim(), ErrorKind::invalid_argument,
          "relative entropy: dimension mismatch");
  const RVec& mu = varsigma.spectrum();
  const Mat& v = varsigma.eigenvectors();
  const double scale = std::max(1.0, mu(mu.size() - 1));

  // Mass of sigma on ker(varsigma).
  double kernel_mass = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (mu(j) < tol::kernel_eig * scale)
      kernel_mass += (v.col(j).adjoint() * sigma.matrix() * v.col(j)).real()(0);
  }
  if (kernel_mass > tol::support_mass) return kInf;

  double tr_sigma_log_sigma = 0.0;
  for (Eigen::Index i = 0; i < sigma.spectrum().size(); ++i) {
    const double lam = sigma.spectrum()(i);
    if (lam > tol::zero_eig) tr_sigma_log_sigma += lam * std::log2(lam);
  }
  double tr_sigma_log_varsigma = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (mu(j) < tol::kernel_eig * scale) continue;
    const double w = (v.col(j).adjoint() * sigma.matrix() * v.col(j)).real()(0);
    tr_sigma_log_varsigma += w * std::log2(mu(j));
  }
  return tr_sigma_log_sigma - tr_sigma_log_varsigma;
}

double relative_entropy_of(const Mat& sigma, const Mat& varsigma) {
  return relative_entropy(PositiveOperator(sigma), PositiveOperator(varsigma));
}

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  return trace_distance_of(a.matrix(), b.matrix());
}

double trace_distance_of(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          ErrorKind::invalid_argument, "trace distance: dimension mismatch");
  auto es = eig_hermitian(hermitize(a - b));
  return es.values.cwiseAbs().sum();
}

Mat partial_trace(const Mat& m, Eigen::Index dim_h, Eigen::Index dim_k,
                  KeepFactor keep) {
  require(m.rows() == dim_h * dim_k && m.cols() == m.rows(),
          ErrorKind::invalid_argument,
          "partial trace: dims do not factor the input dimension");
  if (keep == KeepFactor::first) {
    Mat out = Mat::Zero(dim_h, dim_h);
    for (Eigen::Index i = 0; i < dim_h; ++i)
      for (Eigen::Index j = 0; j < dim_h; ++j)
        for (Eigen::Index k = 0; k < dim_k; ++k)
          out(i, j) += m(i * dim_k + k, j * dim_k + k);
    return out;
  }
  Mat out = Mat::Zero(dim_k, dim_k);
  for (Eigen::Index k = 0; k < dim_k; ++k)
    for (Eigen::Index l = 0; l < dim_k; ++l)
      for (Eigen::Index i = 0; i < dim_h; ++i)
        out(k, l) += m(i * dim_k + k, i * dim_k + l);
  return out;
}

Mat permute_factors(const Mat& m, const std::vector<Eigen::Index>& dims,
                    const std::vector<int>& perm) {
  Eigen::Index total = 1;
  for (Eigen::Index d : dims) total *= d;
  require(m.rows() == total && m.cols() == total && dims.size() == perm.size(),
          ErrorKind::invalid_argument, "permute_factors: shape mismatch");
  const std::size_t nf = dims.size();

  // Strides of the old (row-major composite) indexing.
  std::vector<Eigen::Index> stride(nf, 1);
  for (std::size_t f = nf - 1; f > 0; --f)
    stride[f - 1] = stride[f] * dims[f];

  auto old_index = [&](Eigen::Index flat_new) {
    // Decompose the new flat index along permuted dims, then reassemble.
    Eigen::Index rem = flat_new, old = 0;
    std::vector<Eigen::Index> new_stride(nf, 1);
    for (std::size_t p = nf - 1; p > 0; --p)
      new_stride[p - 1] = new_stride[p] * dims[static_cast<std::size_t>(perm[p])];
    for (std::size_t p = 0; p < nf; ++p) {
      const Eigen::Index idx = rem / new_stride[p];
      rem %= new_stride[p];
      old += idx * stride[static_cast<std::size_t>(perm[p])];
    }
    return old;
  };

  Mat out(total, total);
  std::vector<Eigen::Index> map(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i)
    map[static_cast<std::size_t>(i)] = old_index(i);
  for (Eigen::Index i = 0; i < total; ++i)
    for (Eigen::Index j = 0; j < total; ++j)
      out(i, j) = m(map[static_cast<std::size_t>(i)],
                    map[static_cast<std::size_t>(j)]);
  return out;
}

Mat log2_psd(const Mat& m, double floor) {
  auto es = eig_hermitian(hermitize(m));
  const double lo = std::log2(floor);
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lam = es.values(i);
    const double lg = (lam > floor) ? std::log2(lam) : lo;
    out += lg * (es.vectors.col(i) * es.vectors.col(i).adjoint());
  }
  return out;
}

}  // namespace qclab
