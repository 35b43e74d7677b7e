#include "channels.hpp"

#include <cmath>

namespace qclab {

namespace {

CVec vec_of(const Mat& m) {
  return Eigen::Map<const CVec>(m.data(), m.size());
}

Mat unvec(const CVec& v, Eigen::Index rows) {
  return Eigen::Map<const Mat>(v.data(), rows, v.size() / rows);
}

// Entropy and log2 of a PSD output in one eigendecomposition.
struct EntLog {
  double entropy;
  Mat log2m;
};

EntLog entropy_and_log(const Mat& y, double floor = 1e-18) {
  auto es = eig_hermitian(hermitize(y));
  double h = 0.0;
  const double lo = std::log2(floor);
  Mat lg = Mat::Zero(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lam = es.values(i);
    h += eta(std::max(lam, 0.0));
    const double l2 = (lam > floor) ? std::log2(lam) : lo;
    lg.noalias() += l2 * (es.vectors.col(i) * es.vectors.col(i).adjoint());
  }
  return {h, std::move(lg)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Channel base
// ---------------------------------------------------------------------------

BlockOperator Channel::apply_hybrid(const HybridState& s) const {
  fail(ErrorKind::invalid_argument,
       "channel does not accept hybrid inputs (space mismatch)");
  (void)s;
}

Mat Channel::pullback_log_output(const BlockOperator&) const {
  fail(ErrorKind::invalid_argument,
       "channel does not support gradient pullbacks");
}

Mat Channel::adjoint_identity() const {
  return Mat::Identity(in_dim_, in_dim_);
}

std::pair<double, Mat> Channel::output_entropy_grad(const Mat& rho) const {
  BlockOperator y = apply(rho);
  const double h = y.entropy();
  Mat g = -pullback_log_output(y) - adjoint_identity() / std::log(2.0);
  return {h, hermitize(g)};
}

// ---------------------------------------------------------------------------
// KrausChannel
// ---------------------------------------------------------------------------

KrausChannel::KrausChannel(std::vector<Mat> kraus, bool require_tp)
    : Channel(kraus.empty() ? 0 : kraus.front().cols()),
      kraus_(std::move(kraus)) {
  require(!kraus_.empty(), ErrorKind::validation, "empty Kraus list");
  out_dim_ = kraus_.front().rows();
  for (const auto& k : kraus_)
    require(k.rows() == out_dim_ && k.cols() == in_dim_, ErrorKind::validation,
            "Kraus operators have inconsistent shapes");

  Mat acc = Mat::Zero(in_dim_, in_dim_);
  for (const auto& k : kraus_) acc.noalias() += k.adjoint() * k;
  adj_id_ = hermitize(acc);
  const double dev =
      (adj_id_ - Mat::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff();
  tp_ = dev <= tol::kraus_complete;
  if (require_tp)
    require(tp_, ErrorKind::validation,
            "Kraus set is not complete: |sum K^dag K - I| = " +
                std::to_string(dev));
  if (!tp_) {
    // CP trace-nonincreasing is the only other sanctioned form.
    auto es = eig_hermitian(adj_id_);
    require(es.values.maxCoeff() <= 1.0 + 1e-9 &&
                es.values.minCoeff() >= -1e-10,
            ErrorKind::validation, "Kraus set is not trace-nonincreasing");
  }

  // Precomputed superoperator: vec(K rho K^dag) = kron(conj K, K) vec(rho).
  if (in_dim_ * in_dim_ * out_dim_ * out_dim_ <= 1 << 20) {
    use_superop_ = true;
    superop_ = Mat::Zero(out_dim_ * out_dim_, in_dim_ * in_dim_);
    for (const auto& k : kraus_) superop_ += kron(k.conjugate(), k);
    superop_adj_ = superop_.adjoint();
  }
}

Mat KrausChannel::apply_mat(const Mat& rho) const {
  require(rho.rows() == in_dim_ && rho.cols() == in_dim_,
          ErrorKind::invalid_argument, "channel input has wrong dimension");
  if (use_superop_) {
    CVec v = superop_ * vec_of(rho);
    return unvec(v, out_dim_);
  }
  Mat out = Mat::Zero(out_dim_, out_dim_);
  for (const auto& k : kraus_) out.noalias() += k * rho * k.adjoint();
  return out;
}

Mat KrausChannel::adjoint_apply(const Mat& x) const {
  require(x.rows() == out_dim_ && x.cols() == out_dim_,
          ErrorKind::invalid_argument, "adjoint input has wrong dimension");
  if (use_superop_) {
    CVec v = superop_adj_ * vec_of(x);
    return unvec(v, in_dim_);
  }
  Mat out = Mat::Zero(in_dim_, in_dim_);
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * x * k;
  return out;
}

BlockOperator KrausChannel::apply(const Mat& rho) const {
  return BlockOperator::quantum(apply_mat(rho));
}

Mat KrausChannel::pullback_log_output(const BlockOperator& y) const {
  return adjoint_apply(log2_psd(y.as_quantum()));
}

std::pair<double, Mat> KrausChannel::output_entropy_grad(const Mat& rho) const {
  EntLog el = entropy_and_log(apply_mat(rho));
  Mat g = -adjoint_apply(el.log2m) - adj_id_ / std::log(2.0);
  return {el.entropy, hermitize(g)};
}

// ---------------------------------------------------------------------------
// DirectSumChannel
// ---------------------------------------------------------------------------

DirectSumChannel::DirectSumChannel(std::vector<ChannelPtr> components,
                                   std::vector<double> probs)
    : Channel(components.empty() ? 0 : components.front()->input_dim()),
      components_(std::move(components)),
      probs_(std::move(probs)) {
  require(!components_.empty() && components_.size() == probs_.size(),
          ErrorKind::validation, "component/probability count mismatch");
  double total = 0.0;
  for (double p : probs_) {
    require(p >= -tol::prob_sum, ErrorKind::validation,
            "mixture probability is negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= tol::prob_sum, ErrorKind::validation,
          "mixture probabilities sum to " + std::to_string(total));
  for (const auto& c : components_) {
    require(c->input_dim() == in_dim_ && !c->hybrid_input(),
            ErrorKind::validation, "mixture components have mismatched inputs");
    block_counts_.push_back(
        c->apply(Mat::Identity(in_dim_, in_dim_) / static_cast<double>(in_dim_))
            .blocks()
            .size());
  }
  // Trace preservation probed on seeded random states.
  Rng rng(0x05ull + static_cast<std::uint64_t>(in_dim_));
  for (int probe = 0; probe < 8; ++probe) {
    DensityMatrix rho = random_state(in_dim_, in_dim_, rng.raw());
    require(std::abs(apply(rho.matrix()).trace() - 1.0) <= 1e-10,
            ErrorKind::validation, "mixture action is not trace preserving");
  }
}

BlockOperator DirectSumChannel::apply(const Mat& rho) const {
  BlockOperator out;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    BlockOperator part = components_[j]->apply(rho);
    part.scale(probs_[j]);
    for (const auto& b : part.blocks()) out.append(b);
  }
  return out;
}

Mat DirectSumChannel::pullback_log_output(const BlockOperator& y) const {
  // Phi^*(log2 Y) = sum_j q_j Phi_j^*(log2 Y_j) over the component slices.
  Mat acc = Mat::Zero(in_dim_, in_dim_);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const std::size_t nb = block_counts_[j];
    if (probs_[j] > 0) {
      BlockOperator slice;
      for (std::size_t k = 0; k < nb; ++k) slice.append(y.blocks()[pos + k]);
      acc += probs_[j] * components_[j]->pullback_log_output(slice);
    }
    pos += nb;
  }
  return acc;
}

Mat DirectSumChannel::adjoint_identity() const {
  Mat acc = Mat::Zero(in_dim_, in_dim_);
  for (std::size_t j = 0; j < components_.size(); ++j)
    acc += probs_[j] * components_[j]->adjoint_identity();
  return acc;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

ChannelPtr identity_channel(Eigen::Index dim) {
  return std::make_shared<KrausChannel>(
      std::vector<Mat>{Mat::Identity(dim, dim)});
}

ChannelPtr depolarizing_channel(double p, Eigen::Index dim) {
  require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument,
          "depolarizing parameter must be in [0,1]");
  std::vector<Mat> ks;
  ks.push_back(std::sqrt(1.0 - p) * Mat::Identity(dim, dim));
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      Mat e = Mat::Zero(dim, dim);
      e(i, j) = std::sqrt(p / static_cast<double>(dim));
      ks.push_back(std::move(e));
    }
  return std::make_shared<KrausChannel>(std::move(ks));
}

ChannelPtr dephasing_channel(double p, Eigen::Index dim) {
  require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument,
          "dephasing parameter must be in [0,1]");
  std::vector<Mat> ks;
  ks.push_back(std::sqrt(1.0 - p) * Mat::Identity(dim, dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Mat e = Mat::Zero(dim, dim);
    e(i, i) = std::sqrt(p);
    ks.push_back(std::move(e));
  }
  return std::make_shared<KrausChannel>(std::move(ks));
}

ChannelPtr amplitude_damping_channel(double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::invalid_argument,
          "damping parameter must be in [0,1]");
  Mat k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return std::make_shared<KrausChannel>(std::vector<Mat>{k0, k1});
}

ChannelPtr kraus_channel(std::vector<Mat> kraus) {
  return std::make_shared<KrausChannel>(std::move(kraus));
}

ChannelPtr partial_trace_channel(Eigen::Index dim_h, Eigen::Index dim_k,
                                 KeepFactor keep) {
  std::vector<Mat> ks;
  if (keep == KeepFactor::first) {
    for (Eigen::Index k = 0; k < dim_k; ++k) {
      Mat m = Mat::Zero(dim_h, dim_h * dim_k);
      for (Eigen::Index i = 0; i < dim_h; ++i) m(i, i * dim_k + k) = 1.0;
      ks.push_back(std::move(m));
    }
  } else {
    for (Eigen::Index i = 0; i < dim_h; ++i) {
      Mat m = Mat::Zero(dim_k, dim_h * dim_k);
      for (Eigen::Index k = 0; k < dim_k; ++k) m(k, i * dim_k + k) = 1.0;
      ks.push_back(std::move(m));
    }
  }
  return std::make_shared<KrausChannel>(std::move(ks));
}

ChannelPtr cq_channel(const std::vector<Mat>& povm,
                      const std::vector<Mat>& outputs) {
  require(!povm.empty() && povm.size() == outputs.size(),
          ErrorKind::validation, "POVM/output count mismatch");
  const Eigen::Index din = povm.front().rows();
  Mat sum = Mat::Zero(din, din);
  for (const auto& m : povm) sum += m;
  require((sum - Mat::Identity(din, din)).cwiseAbs().maxCoeff() <=
              tol::kraus_complete,
          ErrorKind::validation, "POVM does not sum to the identity");

  // Kraus form of the measure-and-prepare map: sqrt(t_a mu_b) |u_a><m_b|.
  std::vector<Mat> ks;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    PositiveOperator m(povm[k]);
    DensityMatrix t(outputs[k]);
    for (Eigen::Index b = 0; b < m.spectrum().size(); ++b) {
      if (m.spectrum()(b) <= tol::zero_eig) continue;
      for (Eigen::Index a = 0; a < t.spectrum().size(); ++a) {
        if (t.spectrum()(a) <= tol::zero_eig) continue;
        Mat op = std::sqrt(t.spectrum()(a) * m.spectrum()(b)) *
                 (t.eigenvectors().col(a) * m.eigenvectors().col(b).adjoint());
        ks.push_back(std::move(op));
      }
    }
  }
  return std::make_shared<KrausChannel>(std::move(ks));
}

ChannelPtr direct_sum_mixture(std::vector<ChannelPtr> components,
                              std::vector<double> probs) {
  return std::make_shared<DirectSumChannel>(std::move(components),
                                            std::move(probs));
}

ChannelPtr tensor_channels(const ChannelPtr& a, const ChannelPtr& b) {
  // Direct sums distribute over the tensor product blockwise.
  if (const auto* da = dynamic_cast<const DirectSumChannel*>(a.get())) {
    std::vector<ChannelPtr> comps;
    for (const auto& c : da->components()) comps.push_back(tensor_channels(c, b));
    return std::make_shared<DirectSumChannel>(std::move(comps), da->probs());
  }
  if (const auto* db = dynamic_cast<const DirectSumChannel*>(b.get())) {
    std::vector<ChannelPtr> comps;
    for (const auto& c : db->components()) comps.push_back(tensor_channels(a, c));
    return std::make_shared<DirectSumChannel>(std::move(comps), db->probs());
  }
  const auto* ka = dynamic_cast<const KrausChannel*>(a.get());
  const auto* kb = dynamic_cast<const KrausChannel*>(b.get());
  require(ka != nullptr && kb != nullptr, ErrorKind::invalid_argument,
          "tensor_channels: unsupported descriptor combination");
  std::vector<Mat> ks;
  ks.reserve(ka->kraus().size() * kb->kraus().size());
  for (const auto& x : ka->kraus())
    for (const auto& y : kb->kraus()) ks.push_back(kron(x, y));
  return std::make_shared<KrausChannel>(std::move(ks),
                                        ka->trace_preserving() &&
                                            kb->trace_preserving());
}

ChannelPtr random_channel(Eigen::Index dim_in, Eigen::Index dim_out,
                          Eigen::Index kraus_rank, std::uint64_t seed) {
  require(kraus_rank >= 1, ErrorKind::invalid_argument, "kraus_rank >= 1");
  Rng rng(seed);
  // Haar isometry V: H -> H' (x) C^rank; K_j = (I (x) <j|) V.
  Mat v = haar_isometry(rng, dim_out * kraus_rank, dim_in);
  std::vector<Mat> ks;
  for (Eigen::Index j = 0; j < kraus_rank; ++j) {
    Mat k(dim_out, dim_in);
    for (Eigen::Index i = 0; i < dim_out; ++i) k.row(i) = v.row(i * kraus_rank + j);
    ks.push_back(std::move(k));
  }
  return std::make_shared<KrausChannel>(std::move(ks));
}

ChannelPtr random_cq_channel(Eigen::Index dim, Eigen::Index outcomes,
                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Mat> gs;
  Mat total = Mat::Zero(dim, dim);
  for (Eigen::Index k = 0; k < outcomes; ++k) {
    Mat g = ginibre(rng, dim, dim);
    Mat p = g * g.adjoint();
    total += p;
    gs.push_back(std::move(p));
  }
  // M_k = S^{-1/2} G_k S^{-1/2} sums to the identity.
  auto es = eig_hermitian(total);
  Mat inv_sqrt = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    inv_sqrt += (1.0 / std::sqrt(es.values(i))) *
                (es.vectors.col(i) * es.vectors.col(i).adjoint());
  std::vector<Mat> povm, outs;
  for (auto& g : gs) {
    povm.push_back(hermitize(inv_sqrt * g * inv_sqrt));
    outs.push_back(random_state(dim, dim, rng.raw()).matrix());
  }
  return cq_channel(povm, outs);
}

// ---------------------------------------------------------------------------
// Ensembles through channels
// ---------------------------------------------------------------------------

HybridEnsemble::HybridEnsemble(std::vector<Item> its) : items(std::move(its)) {
  require(!items.empty(), ErrorKind::validation, "ensemble must be nonempty");
  double total = 0.0;
  for (const auto& it : items) total += it.p;
  require(std::abs(total - 1.0) <= tol::prob_sum, ErrorKind::validation,
          "hybrid ensemble probabilities sum to " + std::to_string(total));
}

HybridState HybridEnsemble::average() const {
  const auto& first = items.front().state;
  std::vector<Mat> acc(first.slots(),
                       Mat::Zero(first.dim(), first.dim()));
  for (const auto& it : items) {
    require(it.state.slots() == acc.size(), ErrorKind::invalid_argument,
            "hybrid ensemble members have different slot counts");
    for (std::size_t j = 0; j < acc.size(); ++j)
      acc[j] += it.p * it.state.parts()[j];
  }
  return HybridState(std::move(acc));
}

double holevo_quantity(const Channel& phi, const Ensemble& e) {
  BlockOperator avg;
  double member_entropy = 0.0;
  for (const auto& it : e.items()) {
    BlockOperator y = phi.apply(it.state.matrix());
    member_entropy += it.p * y.entropy();
    avg.add_scaled(y, it.p);
  }
  return avg.entropy() - member_entropy;
}

double holevo_quantity(const Channel& phi, const HybridEnsemble& e) {
  BlockOperator avg;
  double member_entropy = 0.0;
  for (const auto& it : e.items) {
    BlockOperator y = phi.apply_hybrid(it.state);
    member_entropy += it.p * y.entropy();
    avg.add_scaled(y, it.p);
  }
  return avg.entropy() - member_entropy;
}

double donald_residual(const Channel& phi, const Ensemble& e,
                       const DensityMatrix& omega) {
  BlockOperator ref = phi.apply(omega.matrix());
  BlockOperator avg;
  double distance_sum = 0.0;
  double member_entropy = 0.0;
  for (const auto& it : e.items()) {
    BlockOperator y = phi.apply(it.state.matrix());
    distance_sum += it.p * relative_entropy(y, ref);
    member_entropy += it.p * y.entropy();
    avg.add_scaled(y, it.p);
  }
  const double chi = avg.entropy() - member_entropy;
  return distance_sum - chi - relative_entropy(avg, ref);
}

std::shared_ptr<const KrausChannel> psi_sub_a(const ChannelPtr& psi,
                                              const Mat& a) {
  const auto& kp = as_kraus(*psi);
  PositiveOperator pa(a);
  require(pa.spectrum().maxCoeff() <= 1.0 + 1e-10, ErrorKind::invalid_argument,
          "operator A must satisfy 0 <= A <= I");
  const Eigen::Index dh = pa.dim();
  const Eigen::Index dk = kp.input_dim();

  Mat sqrt_a = Mat::Zero(dh, dh);
  for (Eigen::Index i = 0; i < dh; ++i)
    sqrt_a += std::sqrt(std::max(0.0, pa.spectrum()(i))) *
              (pa.eigenvectors().col(i) * pa.eigenvectors().col(i).adjoint());

  // Kraus of Psi_A: (<h| (x) I_K') (sqrt(A) (x) L_j).
  std::vector<Mat> ks;
  for (const auto& l : kp.kraus()) {
    Mat big = kron(sqrt_a, l);  // (dh * dk') x (dh * dk)
    const Eigen::Index dkp = l.rows();
    for (Eigen::Index h = 0; h < dh; ++h)
      ks.push_back(big.block(h * dkp, 0, dkp, dh * dk));
  }
  return std::make_shared<KrausChannel>(std::move(ks), /*require_tp=*/false);
}

std::vector<std::pair<double, Mat>> measure_first_factor(
    const Mat& sigma, const Mat& basis_cols, Eigen::Index dim_k) {
  const Eigen::Index dh = basis_cols.rows();
  require(basis_cols.cols() == dh, ErrorKind::invalid_argument,
          "basis must have dim vectors");
  require((basis_cols.adjoint() * basis_cols - Mat::Identity(dh, dh))
              .cwiseAbs()
              .maxCoeff() <= 1e-10,
          ErrorKind::invalid_argument, "basis is not orthonormal");
  require(sigma.rows() == dh * dim_k, ErrorKind::invalid_argument,
          "state dimension does not match basis (x) K");

  std::vector<std::pair<double, Mat>> outcomes;
  for (Eigen::Index j = 0; j < dh; ++j) {
    Mat proj = kron(Mat(basis_cols.col(j) * basis_cols.col(j).adjoint()),
                    Mat::Identity(dim_k, dim_k));
    Mat post = proj * sigma * proj;
    const double p = post.trace().real();
    if (p <= tol::zero_eig) continue;
    outcomes.emplace_back(p, Mat(post / p));
  }
  return outcomes;
}

const KrausChannel& as_kraus(const Channel& c) {
  const auto* k = dynamic_cast<const KrausChannel*>(&c);
  require(k != nullptr, ErrorKind::invalid_argument,
          "operation requires a Kraus-form channel");
  return *k;
}

}  // namespace qclab
