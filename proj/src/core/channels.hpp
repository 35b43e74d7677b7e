#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "states.hpp"

namespace qclab {

class Channel;
using ChannelPtr = std::shared_ptr<const Channel>;

// Completely positive map between finite-dimensional state spaces. Inputs are
// plain density operators or hybrid arrays {rho_j}; outputs live in a direct
// sum of quantum and classical blocks.
class Channel {
 public:
  virtual ~Channel() = default;

  Eigen::Index input_dim() const { return in_dim_; }
  std::uint64_t input_classical_mult() const { return in_mult_; }
  bool hybrid_input() const { return in_mult_ > 1; }

  virtual bool trace_preserving() const { return true; }

  virtual BlockOperator apply(const Mat& rho) const = 0;
  virtual BlockOperator apply_hybrid(const HybridState& s) const;

  // Phi^*(log2 Y) for an output Y of this channel; the workhorse behind
  // entropy gradients.
  virtual Mat pullback_log_output(const BlockOperator& y) const;

  // Phi^*(I); identity for trace-preserving maps.
  virtual Mat adjoint_identity() const;

  double output_entropy(const Mat& rho) const { return apply(rho).entropy(); }

  // (H(Phi(rho)), d/drho H(Phi(rho))) in bits; gradient in the Tr[G drho]
  // sense. Valid for any positive rho (entropy taken unnormalized).
  virtual std::pair<double, Mat> output_entropy_grad(const Mat& rho) const;

 protected:
  Channel(Eigen::Index in_dim, std::uint64_t in_mult = 1)
      : in_dim_(in_dim), in_mult_(in_mult) {}

  Eigen::Index in_dim_;
  std::uint64_t in_mult_;
};

// Channel in Kraus form; also covers trace-nonincreasing CP maps (tp=false).
// Small maps carry a precomputed superoperator.
class KrausChannel : public Channel {
 public:
  explicit KrausChannel(std::vector<Mat> kraus, bool require_tp = true);

  const std::vector<Mat>& kraus() const { return kraus_; }
  Eigen::Index output_dim() const { return out_dim_; }
  bool trace_preserving() const override { return tp_; }

  Mat apply_mat(const Mat& rho) const;
  Mat adjoint_apply(const Mat& x) const;

  BlockOperator apply(const Mat& rho) const override;
  Mat pullback_log_output(const BlockOperator& y) const override;
  Mat adjoint_identity() const override { return adj_id_; }
  std::pair<double, Mat> output_entropy_grad(const Mat& rho) const override;

 private:
  std::vector<Mat> kraus_;
  Eigen::Index out_dim_;
  bool tp_;
  Mat adj_id_;
  bool use_superop_ = false;
  Mat superop_, superop_adj_;
};

// q_1 Phi_1 (+) ... (+) q_n Phi_n acting blockwise into the direct sum.
class DirectSumChannel : public Channel {
 public:
  DirectSumChannel(std::vector<ChannelPtr> components, std::vector<double> probs);

  const std::vector<ChannelPtr>& components() const { return components_; }
  const std::vector<double>& probs() const { return probs_; }

  BlockOperator apply(const Mat& rho) const override;
  Mat pullback_log_output(const BlockOperator& y) const override;
  Mat adjoint_identity() const override;

 private:
  std::vector<ChannelPtr> components_;
  std::vector<double> probs_;
  std::vector<std::size_t> block_counts_;
};

// --- constructors ----------------------------------------------------------

ChannelPtr identity_channel(Eigen::Index dim);
ChannelPtr depolarizing_channel(double p, Eigen::Index dim = 2);
ChannelPtr dephasing_channel(double p, Eigen::Index dim = 2);
ChannelPtr amplitude_damping_channel(double gamma);
ChannelPtr kraus_channel(std::vector<Mat> kraus);
ChannelPtr partial_trace_channel(Eigen::Index dim_h, Eigen::Index dim_k,
                                 KeepFactor keep);

// Measure-and-prepare (entanglement breaking): rho -> sum_k Tr(M_k rho) tau_k.
ChannelPtr cq_channel(const std::vector<Mat>& povm,
                      const std::vector<Mat>& outputs);

ChannelPtr direct_sum_mixture(std::vector<ChannelPtr> components,
                              std::vector<double> probs);

// Kronecker product of two Kraus-backed channels.
ChannelPtr tensor_channels(const ChannelPtr& a, const ChannelPtr& b);

// Seeded generators for sweeps.
ChannelPtr random_channel(Eigen::Index dim_in, Eigen::Index dim_out,
                          Eigen::Index kraus_rank, std::uint64_t seed);
ChannelPtr random_cq_channel(Eigen::Index dim, Eigen::Index outcomes,
                             std::uint64_t seed);

// --- ensembles through channels --------------------------------------------

struct HybridEnsemble {
  struct Item {
    double p;
    HybridState state;
  };
  std::vector<Item> items;

  explicit HybridEnsemble(std::vector<Item> its);
  HybridState average() const;
};

double holevo_quantity(const Channel& phi, const Ensemble& e);
double holevo_quantity(const Channel& phi, const HybridEnsemble& e);

// sum_i pi_i S(Phi(rho_i) || Phi(omega)) - chi - S(Phi(rho_av) || Phi(omega));
// zero for every valid triple by Donald's identity.
double donald_residual(const Channel& phi, const Ensemble& e,
                       const DensityMatrix& omega);

// Psi_A(sigma) = Tr_H[(A (x) I) (Id (x) Psi)(sigma)], a CP map from
// S(H (x) K) into B+(K'); A must satisfy 0 <= A <= I on H.
std::shared_ptr<const KrausChannel> psi_sub_a(const ChannelPtr& psi,
                                              const Mat& a);

// Von Neumann measurement {|e_j><e_j| (x) I_K} on the first factor:
// returns the outcome ensemble {(p_j, sigma_j)} on the full space.
std::vector<std::pair<double, Mat>> measure_first_factor(
    const Mat& sigma, const Mat& basis_cols, Eigen::Index dim_k);

const KrausChannel& as_kraus(const Channel& c);

}  // namespace qclab
