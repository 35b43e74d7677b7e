#pragma once

#include <optional>
#include <string>

#include "channels.hpp"

namespace qclab {

// f(x) = S(x sigma + (1-x) varsigma || varsigma),
// g(x) = S(varsigma || x sigma + (1-x) varsigma); bits, defined on [0,1) and
// at 1 iff the supports coincide.
struct CurvePair {
  RVec grid;
  RVec f_samples;
  RVec g_samples;
  bool equal_support = false;
  double pinsker_c = 0.0;  // (1/2)||sigma - varsigma||_1^2, natural-log units
  bool convex_ok = true;   // nonnegative second divided differences
};

// 0, 0.01, 0.1 .. 0.9, 0.99, and 1 when supports coincide.
RVec default_curve_grid(bool equal_support);

// Sweep generator for the derivative checks: full-rank pairs tempered toward
// the maximally mixed state, so higher derivatives stay within reach of the
// finite-difference stencils at the stated tolerances.
std::pair<DensityMatrix, DensityMatrix> random_curve_pair(Eigen::Index dim,
                                                          std::uint64_t seed);

CurvePair sample_curves(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma, const RVec& grid);
CurvePair sample_curves(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma);

double curve_f(const DensityMatrix& sigma, const DensityMatrix& varsigma,
               double x);
double curve_g(const DensityMatrix& sigma, const DensityMatrix& varsigma,
               double x);

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured deviation (or margin, per check)
  double tolerance = 0.0;
  bool passed = true;
  std::string note;
};

struct Prop5Report {
  bool equal_support = false;
  std::vector<CheckResult> checks;
  bool all_passed = true;
};

// (a) g = x f' - f on the interior grid (central differences, h = 1e-4);
// (b) f(x) = x int_0^x g(t)/t^2 dt by adaptive quadrature;
// (c) f'(0) = 0;
// (d) f'(1) = S(sigma||varsigma) + S(varsigma||sigma) when supports coincide;
// (e) Pinsker floors f, g >= c x^2 in natural-log units (exact sign);
// (f) d^n g(0) = (n-1) d^n f(0) for n = 2, 3 by one-sided differences.
Prop5Report prop5_suite(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma);

struct MixtureCurveReport {
  RVec grid;
  RVec h_samples;        // chi^x - chi^0, computed from ensembles
  RVec f_samples;        // relative-entropy curve
  double delta = 0.0;    // the bracketed quantity of the mixture identity
  double max_identity_dev = 0.0;  // max |h(x) - (x delta - f(x))|
  bool identity_ok = false;
  std::optional<double> fprime_at_1;
  bool fprime_le_delta = true;
};

// Mixture of a probe ensemble on H (x) K with the product of two marginal
// ensembles; verifies h(x) = x delta - f(x) and, for an optimal probe,
// f'(1) <= delta.
MixtureCurveReport mixture_curve(const ChannelPtr& phi, const ChannelPtr& psi,
                                 const Ensemble& phi_ensemble,
                                 const Ensemble& psi_ensemble,
                                 const Ensemble& probe, const RVec& grid,
                                 bool probe_is_optimal = false);

}  // namespace qclab
