#pragma once

#include <string>

#include "solvers.hpp"

namespace qclab {

struct GapReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // rhs - lhs unless the check documents otherwise
  std::optional<double> bound;
  bool within_bound = true;
  std::string note;
  // Provenance: named values entering the comparison.
  std::vector<std::pair<std::string, double>> terms;
};

struct InequalityBundle {
  GapReport subadditivity;      // chi_Phi + chi_Psi - chi_joint >= 0
  GapReport cor5;               // chi gap dominates the entropy gap
  GapReport product_residual;   // additivity on product states
};

// Both sides of the chi-function subadditivity statement at sigma, the Cor 5
// comparison, and the product-state residual.
InequalityBundle inequality_report(const ChannelPtr& phi, const ChannelPtr& psi,
                                   const DensityMatrix& sigma,
                                   const SolveOptions& opts = {});

// Thm 2: min average joint output entropy under both fixed marginals of the
// ensemble average, against the sum of the two convex closures; also carries
// the equivalent capacity-additivity residual.
GapReport theorem2_gap(const ChannelPtr& phi, const ChannelPtr& psi,
                       const DensityMatrix& rho, const DensityMatrix& varrho,
                       const SolveOptions& opts = {});

// Cor 7 lower bound for the {rho} (x) {varrho}-constrained capacity.
GapReport corollary7_bound(const ChannelPtr& phi, const ChannelPtr& psi,
                           const DensityMatrix& rho, const DensityMatrix& varrho,
                           const SolveOptions& opts = {});

// Prop 3: |C(hat Phi (x) Psi) - max_sigma[(1-q) chi + q log2 d Tr(E (x) I)]|
// <= q (log2 dim K' + 1). The K-marginal constraint set applies to both sides.
GapReport prop3_check(const ChannelPtr& phi, const ChannelPtr& psi, const Mat& e,
                      double q, std::uint64_t d,
                      const std::optional<ConstraintSet>& set_b = std::nullopt,
                      const SolveOptions& opts = {});

// C(hat Phi_d(A,p) [(x) Psi]) against the penalized limit objective, one
// report per d. Without a partner this probes the first limit; with a partner
// and constraint set the second.
std::vector<GapReport> asymp_probe(const ChannelPtr& phi, const Mat& a, double p,
                                   const std::vector<std::uint64_t>& d_list,
                                   const ChannelPtr& psi = nullptr,
                                   const std::optional<ConstraintSet>& set_b =
                                       std::nullopt,
                                   const SolveOptions& opts = {});

// Thm 3 (ii): nu_H(Phi (x) Psi, A (x) I + I (x) B) - nu_H(Phi,A) - nu_H(Psi,B).
GapReport theorem3_ii_gap(const ChannelPtr& phi, const ChannelPtr& psi,
                          const Mat& a, const Mat& b,
                          const SolveOptions& opts = {});

// Finite-(d,e) minimum output entropies of the tilde extensions against the
// three limiting objectives, with the explicit remainder bounds.
std::vector<GapReport> tilde_moe_probe(const ChannelPtr& phi,
                                       const ChannelPtr& psi, const Mat& a,
                                       double p, const Mat& b, double r,
                                       const std::vector<std::uint64_t>& d_list,
                                       const std::vector<std::uint64_t>& e_list,
                                       const SolveOptions& opts = {});

// Noiseless case: C(Id (x) Psi, {rho} (x) full simplex) = H(rho) + C(Psi).
GapReport s_c_add_report(const ChannelPtr& psi, const DensityMatrix& rho,
                         const SolveOptions& opts = {});

// max over sigma with Tr_H sigma in set_b (when given) of
// chi_{Phi (x) Psi}(sigma) + Tr[linear sigma]; shared by the checks above.
SolveReport constrained_joint_chi(const ChannelPtr& joint, Eigen::Index dim_h,
                                  Eigen::Index dim_k, const Mat& linear,
                                  const std::optional<ConstraintSet>& set_b,
                                  const SolveOptions& opts);

}  // namespace qclab
