#pragma once

#include "core/channels.hpp"
#include "core/states.hpp"

namespace qct {

using namespace qclab;

inline Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Mat ket_bra(const CVec& v) { return v * v.adjoint(); }

inline CVec basis_ket(Eigen::Index dim, Eigen::Index j) {
  CVec v = CVec::Zero(dim);
  v(j) = 1.0;
  return v;
}

inline Mat proj0() { return diag2(1, 0); }
inline Mat proj1() { return diag2(0, 1); }

inline Mat plus_state() {
  CVec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return ket_bra(v);
}

inline Mat minus_state() {
  CVec v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return ket_bra(v);
}

// |Phi+><Phi+| on C^2 (x) C^2 with the (h,k) -> 2h + k index convention.
inline Mat bell_state() {
  CVec v = CVec::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return ket_bra(v);
}

inline Mat maximally_mixed(Eigen::Index dim) {
  return Mat::Identity(dim, dim) / static_cast<double>(dim);
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qct
