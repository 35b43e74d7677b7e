#pragma once

#include "channels.hpp"

namespace qclab {

// Largest classical multiplicity that operations may materialize; beyond it
// only closed-form block arithmetic is available.
inline constexpr std::uint64_t kMaterializeCap = 4096;

// Channel extension mapping B(H) (x) C^d into B(H') (+) C^{d+1}:
// {rho_j} |-> (1-q) Phi(rho) (+) q [Tr rho Ebar, Tr rho_1 E, ..., Tr rho_d E].
class ShorHatChannel : public Channel {
 public:
  ShorHatChannel(ChannelPtr base, Mat e_op, double q, std::uint64_t d);

  const ChannelPtr& base() const { return base_; }
  const Mat& e_op() const { return e_op_; }
  Mat e_bar() const;
  double q() const { return q_; }
  std::uint64_t d() const { return d_; }

  BlockOperator apply(const Mat& rho) const override;  // rejects: hybrid input
  BlockOperator apply_hybrid(const HybridState& s) const override;

 private:
  ChannelPtr base_;
  Mat e_op_;
  double q_;
  std::uint64_t d_;
};

// The restriction of the extension to inputs rho (x) tau with tau the uniform
// classical state: rho |-> (1-q) Phi(rho) (+) q [Tr rho Ebar, d^-1 Tr E rho
// (d times)]. Plain quantum input, so it feeds every solver directly.
class ShorTildeChannel : public Channel {
 public:
  ShorTildeChannel(ChannelPtr base, Mat e_op, double q, std::uint64_t d);

  const ChannelPtr& base() const { return base_; }
  const Mat& e_op() const { return e_op_; }
  double q() const { return q_; }
  std::uint64_t d() const { return d_; }

  BlockOperator apply(const Mat& rho) const override;
  Mat pullback_log_output(const BlockOperator& y) const override;
  std::pair<double, Mat> output_entropy_grad(const Mat& rho) const override;

 private:
  ChannelPtr base_;
  Mat e_op_;
  Mat e_bar_;
  double q_;
  std::uint64_t d_;
};

std::shared_ptr<const ShorHatChannel> shor_hat(ChannelPtr base, const Mat& e_op,
                                               double q, std::uint64_t d);
std::shared_ptr<const ShorTildeChannel> shor_tilde(ChannelPtr base,
                                                   const Mat& e_op, double q,
                                                   std::uint64_t d);

// The (A, p) parameterization: q = p / log2 d.
std::shared_ptr<const ShorHatChannel> shor_hat_dp(ChannelPtr base, const Mat& a,
                                                  double p, std::uint64_t d);
std::shared_ptr<const ShorTildeChannel> shor_tilde_dp(ChannelPtr base,
                                                      const Mat& a, double p,
                                                      std::uint64_t d);

// h2(q') + (1-q') H(Phi(rho)) + p Tr A rho + q' h2(Tr A rho), q' = p/log2 d.
double tilde_entropy_closed_form(const Channel& base, const Mat& a, double p,
                                 std::uint64_t d, const Mat& rho);

// The symmetric lifted ensemble {d^-1 mu_i, delta_j(sigma_i)}.
HybridEnsemble lifted_symmetric_ensemble(const Ensemble& base, std::uint64_t d);

// Tensor extension hat(Phi) (x) Psi acting on arrays {sigma_j} of operators on
// H (x) K: (1-q)(Phi (x) Psi)(sigma) (+) q [Psi_Ebar(sigma), Psi_E(sigma_1),
// ..., Psi_E(sigma_d)].
class ShorHatTensorChannel : public Channel {
 public:
  ShorHatTensorChannel(std::shared_ptr<const ShorHatChannel> hat,
                       ChannelPtr psi);

  BlockOperator apply(const Mat& rho) const override;  // rejects: hybrid input
  BlockOperator apply_hybrid(const HybridState& s) const override;

  // Output at the uniform array [d^-1 sigma, ..., d^-1 sigma]; keeps the d
  // repeated classical-readout blocks symbolic, so d may be astronomically
  // large.
  BlockOperator apply_symmetric_average(const Mat& sigma) const;

  const KrausChannel& psi_e() const { return *psi_e_; }
  const KrausChannel& psi_ebar() const { return *psi_ebar_; }
  const ChannelPtr& joint() const { return joint_; }
  const ShorHatChannel& hat() const { return *hat_; }

 private:
  std::shared_ptr<const ShorHatChannel> hat_;
  ChannelPtr psi_;
  ChannelPtr joint_;  // Phi (x) Psi
  std::shared_ptr<const KrausChannel> psi_e_, psi_ebar_;
};

std::shared_ptr<const ShorHatTensorChannel> tensor_hat(
    std::shared_ptr<const ShorHatChannel> hat, ChannelPtr psi);

// Tensor of two tilde extensions, expanded into its four direct-sum pieces;
// the repeated blocks stay symbolic in d and e throughout.
class TildeTensorChannel : public Channel {
 public:
  TildeTensorChannel(std::shared_ptr<const ShorTildeChannel> left,
                     std::shared_ptr<const ShorTildeChannel> right);

  BlockOperator apply(const Mat& sigma) const override;
  Mat pullback_log_output(const BlockOperator& y) const override;

 private:
  std::shared_ptr<const ShorTildeChannel> left_, right_;
  ChannelPtr joint_;  // Phi (x) Psi
  // CP slices: X_A(sigma) = Tr_H[(A (x) I)(Id (x) Psi)(sigma)] and mirrored.
  std::shared_ptr<const KrausChannel> psi_a_, psi_abar_, phi_b_, phi_bbar_;
  Mat a_op_, b_op_;  // lifted to H (x) K
  double qa_, qb_;
};

std::shared_ptr<const TildeTensorChannel> tensor_tilde(
    std::shared_ptr<const ShorTildeChannel> left,
    std::shared_ptr<const ShorTildeChannel> right);

}  // namespace qclab
