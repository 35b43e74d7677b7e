#pragma once

#include <utility>
#include <vector>

#include "common.hpp"

namespace qclab {

// (M + M^dag)/2 -- used to scrub rounding noise off operators that are
// Hermitian by construction.
Mat hermitize(const Mat& m);

// Kronecker product with the (h,k) -> h*dK + k index convention used
// throughout: kron(A, B) acts on the composite space H (x) K.
Mat kron(const Mat& a, const Mat& b);

struct EigSystem {
  RVec values;   // ascending
  Mat vectors;   // columns
};

EigSystem eig_hermitian(const Mat& m);

// Validated Hermitian operator on a dim-dimensional space.
class HermitianOperator {
 public:
  explicit HermitianOperator(Mat m);

  const Mat& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double trace() const { return mat_.trace().real(); }

 protected:
  Mat mat_;
};

// Positive semidefinite operator; caches its (clamped) spectrum.
class PositiveOperator : public HermitianOperator {
 public:
  explicit PositiveOperator(Mat m);

  // Eigenvalues ascending, clamped into [0, inf).
  const RVec& spectrum() const { return spectrum_; }
  const Mat& eigenvectors() const { return eigenvectors_; }

 private:
  RVec spectrum_;
  Mat eigenvectors_;
};

// Unit-trace positive operator.
class DensityMatrix : public PositiveOperator {
 public:
  explicit DensityMatrix(Mat m);
  explicit DensityMatrix(PositiveOperator op);
};

// Von Neumann entropy -sum lambda log2 lambda of a positive operator
// (not normalized: for Tr S != 1 this is the raw spectral entropy).
double entropy(const PositiveOperator& s);

// Entropy of a raw PSD matrix without constructing a PositiveOperator.
double entropy_of(const Mat& m);

// Quantum relative entropy Tr sigma (log2 sigma - log2 varsigma), bits.
// Returns +inf when supp sigma is not contained in supp varsigma.
double relative_entropy(const PositiveOperator& sigma,
                        const PositiveOperator& varsigma);
double relative_entropy_of(const Mat& sigma, const Mat& varsigma);

// Trace norm ||a - b||_1 = sum |eigenvalues of a - b|.
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);
double trace_distance_of(const Mat& a, const Mat& b);

enum class KeepFactor { first, second };

// Marginal of an operator on H (x) K.
Mat partial_trace(const Mat& m, Eigen::Index dim_h, Eigen::Index dim_k,
                  KeepFactor keep);

// Reorder tensor factors: entry perm[p] names the old factor at new slot p.
Mat permute_factors(const Mat& m, const std::vector<Eigen::Index>& dims,
                    const std::vector<int>& perm);

// log2 of a PSD matrix on its support; eigenvalues below the floor are
// mapped to log2(floor) so downstream gradients stay finite.
Mat log2_psd(const Mat& m, double floor = 1e-18);

}  // namespace qclab
