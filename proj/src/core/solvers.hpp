#pragma once

#include <optional>

#include "shor.hpp"

namespace qclab {

struct SolveOptions {
  int restarts = 16;
  int members = 0;       // 0 -> dim^2 decomposition length
  int max_iters = 400;
  double rel_tol = 1e-9;  // relative improvement threshold ...
  int patience = 50;      // ... over this many iterations
  std::uint64_t seed = 1;
  int jobs = 1;
  double penalty_init = 1e2;
  int penalty_rounds = 6;
};

struct SolveReport {
  double value = 0.0;
  bool converged = false;
  int restarts_used = 0;
  double gap_estimate = 0.0;  // spread of the top-quartile restart values
  std::optional<Ensemble> argmax;
  std::optional<DensityMatrix> arg_state;
  // chi_function also reports the convex closure H_hat(rho) = H(Phi(rho)) - chi.
  double convex_closure = std::numeric_limits<double>::quiet_NaN();
  double constraint_residual = 0.0;  // worst remaining violation, if any
};

struct LinearTerm {
  Mat a;        // 0 <= A <= I
  double alpha; // in [0, 1]
};

// Admissible-average-state set.
class ConstraintSet {
 public:
  enum class Kind { full_simplex, fixed_state, linear };

  static ConstraintSet full_simplex(Eigen::Index dim);
  static ConstraintSet fixed_state(DensityMatrix rho);
  static ConstraintSet linear(Eigen::Index dim, std::vector<LinearTerm> terms);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const DensityMatrix& state() const;
  const std::vector<LinearTerm>& terms() const { return terms_; }

  bool contains(const Mat& rho, double tol = 1e-8) const;
  double worst_violation(const Mat& rho) const;

 private:
  ConstraintSet(Kind k, Eigen::Index dim) : kind_(k), dim_(dim) {}
  Kind kind_;
  Eigen::Index dim_;
  std::optional<DensityMatrix> state_;
  std::vector<LinearTerm> terms_;
};

// A state with Tr A_k rho <= alpha_k - margin for every k, when one exists.
std::optional<DensityMatrix> find_strictly_feasible(
    Eigen::Index dim, const std::vector<LinearTerm>& terms, double margin,
    const SolveOptions& opts = {});

struct Certificate {
  enum class Kind { max_distance, kkt };
  Kind kind = Kind::max_distance;
  bool passed = false;
  double worst_violation = 0.0;
  double reference = 0.0;        // the value the adversary had to beat
  double adversary_value = 0.0;  // what the adversary achieved
  std::vector<double> multipliers;
  std::optional<Ensemble> witness;
};

// ---------------------------------------------------------------------------
// Generic ensemble programs (the two optimization engines)
// ---------------------------------------------------------------------------

// Contributes a * H(Phi(rho_av)) + b * sum_i pi_i H(Phi(psi_i)).
struct EntropyTerm {
  double a = 0.0;
  double b = 0.0;
  ChannelPtr channel;
};

// Maximize  sum_terms + Tr[linear rho_av]  over pure-state ensembles, subject
// to optional constraints on the average state.
struct EnsembleProblem {
  Eigen::Index dim = 0;
  std::vector<EntropyTerm> terms;
  Mat linear;  // empty -> zero

  std::vector<LinearTerm> ineq;       // Tr A_k rho_av <= alpha_k
  std::optional<Mat> fix_marginal_first;   // Tr_K rho_av == given (needs dims)
  std::optional<Mat> fix_marginal_second;  // Tr_H rho_av == given
  Eigen::Index dim_h = 0, dim_k = 0;
};

SolveReport maximize_free_ensemble(const EnsembleProblem& prob,
                                   const SolveOptions& opts);

// Minimize sum_i [ H(Phi(member_i)) + t_i log2 t_i + Tr(linear member_i) ]
// over length-n pure decompositions of rho (members unnormalized). With
// linear = 0 this is the convex closure of the output entropy at rho.
SolveReport minimize_decomposition(const ChannelPtr& phi,
                                   const DensityMatrix& rho, const Mat& linear,
                                   const SolveOptions& opts);

// Minimize H(Phi(psi)) + <psi| linear |psi> over pure states.
SolveReport minimize_pure_state(const ChannelPtr& phi, const Mat& linear,
                                const SolveOptions& opts);

// ---------------------------------------------------------------------------
// Named solvers
// ---------------------------------------------------------------------------

SolveReport chi_function(const ChannelPtr& phi, const DensityMatrix& rho,
                         const SolveOptions& opts = {});

SolveReport constrained_capacity(const ChannelPtr& phi, const ConstraintSet& set,
                                 const SolveOptions& opts = {});

SolveReport min_output_entropy(const ChannelPtr& phi,
                               const SolveOptions& opts = {});

// nu_H(Phi, A) = min_rho [ H(Phi(rho)) + Tr A rho ], A >= 0.
SolveReport nu_h(const ChannelPtr& phi, const Mat& a,
                 const SolveOptions& opts = {});

// H*_Phi(X) = max_rho [ Tr X rho - H(Phi(rho)) ].
SolveReport conjugate_h(const ChannelPtr& phi, const Mat& x,
                        const SolveOptions& opts = {});

// max_rho [ chi_Phi(rho) + p Tr A rho ], 0 <= A <= I, p >= 0.
SolveReport penalized_capacity(const ChannelPtr& phi, const Mat& a, double p,
                               const SolveOptions& opts = {});

// Maximal-distance certificate for an allegedly optimal ensemble.
Certificate certify_optimal(const ChannelPtr& phi, const ConstraintSet& set,
                            const Ensemble& e, double tol,
                            const SolveOptions& opts = {});

// Kuhn-Tucker certificate at rho_av for linear constraints: finds p_k >= 0
// with complementary slackness and probes global maximality of
// chi(rho) + sum p_k Tr Abar_k rho.
Certificate kkt_certificate(const ChannelPtr& phi, const ConstraintSet& set,
                            const DensityMatrix& rho_av, double tol,
                            const SolveOptions& opts = {});

// Entanglement of formation w.r.t. the dim_h (x) dim_k split.
SolveReport eof(const DensityMatrix& sigma, Eigen::Index dim_h,
                Eigen::Index dim_k, const SolveOptions& opts = {});

}  // namespace qclab
