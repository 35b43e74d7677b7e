#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qclab {

using Cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Failure categories; the C API maps these onto process exit codes.
enum class ErrorKind {
  invalid_argument,  // caller violated a precondition
  validation,        // a value failed its type invariant
  parse,             // malformed input file / JSON
  assertion,         // a declared scenario assertion failed
  numerical          // internal numerical breakdown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

namespace tol {
inline constexpr double hermitian      = 1e-12;  // |M - M^dag| elementwise
inline constexpr double eig_clamp      = 1e-12;  // eigenvalues in [-clamp, 0) -> 0
inline constexpr double zero_eig       = 1e-15;  // 0*log 0 cutoff
inline constexpr double trace_one      = 1e-10;
inline constexpr double prob_sum       = 1e-10;
inline constexpr double support_mass   = 1e-10;  // mass of sigma outside supp(varsigma)
inline constexpr double kernel_eig     = 1e-12;  // eigenvalue below this spans the kernel
inline constexpr double kraus_complete = 1e-10;
inline constexpr double solver_slack   = 2e-3;   // default combined slack for two solver values
}  // namespace tol

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log2_safe(double x) { return std::log2(x); }

// -x log2 x with the 0 log 0 := 0 convention.
inline double eta(double x) {
  if (x <= tol::zero_eig) return 0.0;
  return -x * std::log2(x);
}

// Binary entropy in bits.
inline double h2(double x) { return eta(x) + eta(1.0 - x); }

}  // namespace qclab
