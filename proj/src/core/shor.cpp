#include "shor.hpp"

#include <cmath>

namespace qclab {

namespace {

void check_effect(const Mat& e_op) {
  PositiveOperator p(e_op);
  require(p.spectrum().maxCoeff() <= 1.0 + 1e-10, ErrorKind::invalid_argument,
          "operator must satisfy 0 <= E <= I");
}

// Trace preservation probed on seeded random states at construction.
void probe_trace_preserving(const Channel& c, std::uint64_t seed) {
  Rng rng(seed);
  for (int probe = 0; probe < 8; ++probe) {
    DensityMatrix rho = random_state(c.input_dim(), c.input_dim(), rng.raw());
    require(std::abs(c.apply(rho.matrix()).trace() - 1.0) <= 1e-10,
            ErrorKind::validation, "channel action is not trace preserving");
  }
}

void check_q(double q) {
  require(q >= 0.0 && q <= 1.0 + 1e-12, ErrorKind::invalid_argument,
          "q must lie in [0,1]");
}

double safe_log2(double x, double floor = 1e-300) {
  return std::log2(std::max(x, floor));
}

// Tr_K[(I (x) B)(Phi (x) Id)(sigma)]: the mirrored CP slice of psi_sub_a.
std::shared_ptr<const KrausChannel> phi_sub_b(const ChannelPtr& phi,
                                              const Mat& b) {
  const auto& kp = as_kraus(*phi);
  PositiveOperator pb(b);
  require(pb.spectrum().maxCoeff() <= 1.0 + 1e-10, ErrorKind::invalid_argument,
          "operator must satisfy 0 <= B <= I");
  const Eigen::Index dk = pb.dim();

  Mat sqrt_b = Mat::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    sqrt_b += std::sqrt(std::max(0.0, pb.spectrum()(i))) *
              (pb.eigenvectors().col(i) * pb.eigenvectors().col(i).adjoint());

  std::vector<Mat> ks;
  for (const auto& k : kp.kraus())
    for (Eigen::Index row = 0; row < dk; ++row)
      ks.push_back(kron(k, Mat(sqrt_b.row(row))));
  return std::make_shared<KrausChannel>(std::move(ks), /*require_tp=*/false);
}

}  // namespace

// ---------------------------------------------------------------------------
// ShorHatChannel
// ---------------------------------------------------------------------------

ShorHatChannel::ShorHatChannel(ChannelPtr base, Mat e_op, double q,
                               std::uint64_t d)
    : Channel(base->input_dim(), d),
      base_(std::move(base)),
      e_op_(std::move(e_op)),
      q_(q),
      d_(d) {
  require(d_ >= 1, ErrorKind::invalid_argument, "d must be >= 1");
  require(!base_->hybrid_input(), ErrorKind::invalid_argument,
          "base channel must take plain quantum inputs");
  require(e_op_.rows() == base_->input_dim(), ErrorKind::invalid_argument,
          "E must act on the base channel's input space");
  check_effect(e_op_);
  check_q(q_);
}

Mat ShorHatChannel::e_bar() const {
  return Mat::Identity(e_op_.rows(), e_op_.cols()) - e_op_;
}

BlockOperator ShorHatChannel::apply(const Mat&) const {
  fail(ErrorKind::invalid_argument,
       "extension expects a hybrid input array {rho_j}");
}

BlockOperator ShorHatChannel::apply_hybrid(const HybridState& s) const {
  require(s.slots() == d_, ErrorKind::invalid_argument,
          "hybrid input has " + std::to_string(s.slots()) + " slots, expected " +
              std::to_string(d_));
  require(s.dim() == in_dim_, ErrorKind::invalid_argument,
          "hybrid input lives on the wrong space");
  const Mat rho = s.flatten();

  BlockOperator out = base_->apply(rho);
  out.scale(1.0 - q_);

  RVec readout(static_cast<Eigen::Index>(d_) + 1);
  readout(0) = q_ * (e_bar() * rho).trace().real();
  for (std::size_t j = 0; j < d_; ++j)
    readout(static_cast<Eigen::Index>(j) + 1) =
        q_ * (e_op_ * s.parts()[j]).trace().real();
  out.append(ClassicalBlock{std::move(readout)});
  return out;
}

// ---------------------------------------------------------------------------
// ShorTildeChannel
// ---------------------------------------------------------------------------

ShorTildeChannel::ShorTildeChannel(ChannelPtr base, Mat e_op, double q,
                                   std::uint64_t d)
    : Channel(base->input_dim()),
      base_(std::move(base)),
      e_op_(std::move(e_op)),
      q_(q),
      d_(d) {
  require(d_ >= 1, ErrorKind::invalid_argument, "d must be >= 1");
  require(!base_->hybrid_input(), ErrorKind::invalid_argument,
          "base channel must take plain quantum inputs");
  require(e_op_.rows() == base_->input_dim(), ErrorKind::invalid_argument,
          "E must act on the base channel's input space");
  check_effect(e_op_);
  check_q(q_);
  e_bar_ = Mat::Identity(e_op_.rows(), e_op_.cols()) - e_op_;
  probe_trace_preserving(*this, 0x7e57 + d_);
}

BlockOperator ShorTildeChannel::apply(const Mat& rho) const {
  require(rho.rows() == in_dim_, ErrorKind::invalid_argument,
          "channel input has wrong dimension");
  BlockOperator out = base_->apply(rho);
  out.scale(1.0 - q_);
  const double s = (e_bar_ * rho).trace().real();
  const double t = (e_op_ * rho).trace().real();
  out.append(ClassicalBlock{RVec::Constant(1, q_ * s)});
  out.append(UniformClassicalBlock{q_ * t, d_});
  return out;
}

Mat ShorTildeChannel::pullback_log_output(const BlockOperator& y) const {
  const std::size_t nb = y.blocks().size();
  require(nb >= 3, ErrorKind::invalid_argument, "unexpected output shape");

  Mat acc = Mat::Zero(in_dim_, in_dim_);
  if (q_ < 1.0) {
    BlockOperator base_slice;
    for (std::size_t i = 0; i + 2 < nb; ++i) base_slice.append(y.blocks()[i]);
    acc += (1.0 - q_) * base_->pullback_log_output(base_slice);
  }
  if (q_ > 0.0) {
    const auto& cls = std::get<ClassicalBlock>(y.blocks()[nb - 2]);
    const auto& uni = std::get<UniformClassicalBlock>(y.blocks()[nb - 1]);
    acc += q_ * safe_log2(cls.v(0)) * e_bar_;
    acc += q_ * safe_log2(uni.weight / static_cast<double>(uni.mult)) * e_op_;
  }
  return acc;
}

std::pair<double, Mat> ShorTildeChannel::output_entropy_grad(
    const Mat& rho) const {
  BlockOperator y = apply(rho);
  Mat g = -pullback_log_output(y) -
          Mat::Identity(in_dim_, in_dim_) / std::log(2.0);
  return {y.entropy(), hermitize(g)};
}

// ---------------------------------------------------------------------------
// Constructors and closed forms
// ---------------------------------------------------------------------------

std::shared_ptr<const ShorHatChannel> shor_hat(ChannelPtr base, const Mat& e_op,
                                               double q, std::uint64_t d) {
  return std::make_shared<ShorHatChannel>(std::move(base), e_op, q, d);
}

std::shared_ptr<const ShorTildeChannel> shor_tilde(ChannelPtr base,
                                                   const Mat& e_op, double q,
                                                   std::uint64_t d) {
  return std::make_shared<ShorTildeChannel>(std::move(base), e_op, q, d);
}

namespace {

double dp_to_q(double p, std::uint64_t d) {
  require(d >= 2, ErrorKind::invalid_argument,
          "the (A,p) form needs d >= 2");
  require(p >= 0.0, ErrorKind::invalid_argument, "p must be nonnegative");
  const double q = p / std::log2(static_cast<double>(d));
  require(q <= 1.0 + 1e-12, ErrorKind::invalid_argument,
          "p exceeds log2 d: the mixing weight would leave [0,1]");
  return std::min(q, 1.0);
}

}  // namespace

std::shared_ptr<const ShorHatChannel> shor_hat_dp(ChannelPtr base, const Mat& a,
                                                  double p, std::uint64_t d) {
  return shor_hat(std::move(base), a, dp_to_q(p, d), d);
}

std::shared_ptr<const ShorTildeChannel> shor_tilde_dp(ChannelPtr base,
                                                      const Mat& a, double p,
                                                      std::uint64_t d) {
  return shor_tilde(std::move(base), a, dp_to_q(p, d), d);
}

double tilde_entropy_closed_form(const Channel& base, const Mat& a, double p,
                                 std::uint64_t d, const Mat& rho) {
  const double qp = dp_to_q(p, d);
  const double tr_a_rho = (a * rho).trace().real();
  return h2(qp) + (1.0 - qp) * base.output_entropy(rho) + p * tr_a_rho +
         qp * h2(tr_a_rho);
}

HybridEnsemble lifted_symmetric_ensemble(const Ensemble& base,
                                         std::uint64_t d) {
  require(d >= 1 && d <= kMaterializeCap, ErrorKind::invalid_argument,
          "lifted ensemble materialization requires d <= " +
              std::to_string(kMaterializeCap));
  std::vector<HybridEnsemble::Item> items;
  items.reserve(base.size() * d);
  for (const auto& it : base.items())
    for (std::uint64_t j = 0; j < d; ++j)
      items.push_back({it.p / static_cast<double>(d),
                       HybridState::delta(it.state.matrix(), j, d)});
  return HybridEnsemble(std::move(items));
}

// ---------------------------------------------------------------------------
// ShorHatTensorChannel
// ---------------------------------------------------------------------------

ShorHatTensorChannel::ShorHatTensorChannel(
    std::shared_ptr<const ShorHatChannel> hat, ChannelPtr psi)
    : Channel(hat->input_dim() * psi->input_dim(), hat->d()),
      hat_(std::move(hat)),
      psi_(std::move(psi)) {
  joint_ = tensor_channels(hat_->base(), psi_);
  psi_e_ = psi_sub_a(psi_, hat_->e_op());
  psi_ebar_ = psi_sub_a(psi_, hat_->e_bar());
}

BlockOperator ShorHatTensorChannel::apply(const Mat&) const {
  fail(ErrorKind::invalid_argument,
       "extension expects a hybrid input array {sigma_j}");
}

BlockOperator ShorHatTensorChannel::apply_hybrid(const HybridState& s) const {
  require(s.slots() == hat_->d(), ErrorKind::invalid_argument,
          "hybrid input slot count must equal d");
  require(s.dim() == in_dim_, ErrorKind::invalid_argument,
          "hybrid input lives on the wrong space");
  const double q = hat_->q();
  const Mat sigma = s.flatten();

  BlockOperator out = joint_->apply(sigma);
  out.scale(1.0 - q);
  out.append(QuantumBlock{q * psi_ebar_->apply_mat(sigma), 1});
  for (std::size_t j = 0; j < hat_->d(); ++j)
    out.append(QuantumBlock{q * psi_e_->apply_mat(s.parts()[j]), 1});
  return out;
}

BlockOperator ShorHatTensorChannel::apply_symmetric_average(
    const Mat& sigma) const {
  require(sigma.rows() == in_dim_, ErrorKind::invalid_argument,
          "state lives on the wrong space");
  const double q = hat_->q();
  const double d = static_cast<double>(hat_->d());

  BlockOperator out = joint_->apply(sigma);
  out.scale(1.0 - q);
  out.append(QuantumBlock{q * psi_ebar_->apply_mat(sigma), 1});
  out.append(QuantumBlock{(q / d) * psi_e_->apply_mat(sigma), hat_->d()});
  return out;
}

std::shared_ptr<const ShorHatTensorChannel> tensor_hat(
    std::shared_ptr<const ShorHatChannel> hat, ChannelPtr psi) {
  return std::make_shared<ShorHatTensorChannel>(std::move(hat), std::move(psi));
}

// ---------------------------------------------------------------------------
// TildeTensorChannel
// ---------------------------------------------------------------------------

TildeTensorChannel::TildeTensorChannel(
    std::shared_ptr<const ShorTildeChannel> left,
    std::shared_ptr<const ShorTildeChannel> right)
    : Channel(left->input_dim() * right->input_dim()),
      left_(std::move(left)),
      right_(std::move(right)) {
  joint_ = tensor_channels(left_->base(), right_->base());
  const Eigen::Index dh = left_->input_dim();
  const Eigen::Index dk = right_->input_dim();
  const Mat a = left_->e_op();
  const Mat b = right_->e_op();
  const Mat abar = Mat::Identity(dh, dh) - a;
  const Mat bbar = Mat::Identity(dk, dk) - b;

  psi_a_ = psi_sub_a(right_->base(), a);
  psi_abar_ = psi_sub_a(right_->base(), abar);
  phi_b_ = phi_sub_b(left_->base(), b);
  phi_bbar_ = phi_sub_b(left_->base(), bbar);
  a_op_ = kron(a, Mat::Identity(dk, dk));
  b_op_ = kron(Mat::Identity(dh, dh), b);
  qa_ = left_->q();
  qb_ = right_->q();
}

BlockOperator TildeTensorChannel::apply(const Mat& sigma) const {
  require(sigma.rows() == in_dim_, ErrorKind::invalid_argument,
          "channel input has wrong dimension");
  const double d = static_cast<double>(left_->d());
  const double e = static_cast<double>(right_->d());
  const Eigen::Index n = in_dim_;
  const Mat id = Mat::Identity(n, n);

  const double w_ab = ((id - a_op_) * (id - b_op_) * sigma).trace().real();
  const double w_aB = ((id - a_op_) * b_op_ * sigma).trace().real();
  const double w_Ab = (a_op_ * (id - b_op_) * sigma).trace().real();
  const double w_AB = (a_op_ * b_op_ * sigma).trace().real();

  BlockOperator out = joint_->apply(sigma);
  out.scale((1 - qa_) * (1 - qb_));
  out.append(QuantumBlock{qa_ * (1 - qb_) * psi_abar_->apply_mat(sigma), 1});
  out.append(QuantumBlock{qa_ * (1 - qb_) / d * psi_a_->apply_mat(sigma),
                          left_->d()});
  out.append(QuantumBlock{(1 - qa_) * qb_ * phi_bbar_->apply_mat(sigma), 1});
  out.append(QuantumBlock{(1 - qa_) * qb_ / e * phi_b_->apply_mat(sigma),
                          right_->d()});
  out.append(ClassicalBlock{RVec::Constant(1, qa_ * qb_ * w_ab)});
  out.append(UniformClassicalBlock{qa_ * qb_ * w_aB, right_->d()});
  out.append(UniformClassicalBlock{qa_ * qb_ * w_Ab, left_->d()});
  out.append(UniformClassicalBlock{qa_ * qb_ * w_AB, left_->d() * right_->d()});
  return out;
}

Mat TildeTensorChannel::pullback_log_output(const BlockOperator& y) const {
  const auto& bl = y.blocks();
  const std::size_t nb = bl.size();
  require(nb >= 9, ErrorKind::invalid_argument, "unexpected output shape");
  const std::size_t njoint = nb - 8;
  const Eigen::Index n = in_dim_;
  const Mat id = Mat::Identity(n, n);
  const double d = static_cast<double>(left_->d());
  const double e = static_cast<double>(right_->d());
  Mat acc = Mat::Zero(n, n);

  if ((1 - qa_) * (1 - qb_) > 0) {
    BlockOperator joint_slice;
    for (std::size_t i = 0; i < njoint; ++i) joint_slice.append(bl[i]);
    acc += (1 - qa_) * (1 - qb_) * joint_->pullback_log_output(joint_slice);
  }
  if (qa_ * (1 - qb_) > 0) {
    const auto& q1 = std::get<QuantumBlock>(bl[njoint]);
    const auto& q2 = std::get<QuantumBlock>(bl[njoint + 1]);
    acc += qa_ * (1 - qb_) * psi_abar_->adjoint_apply(log2_psd(q1.op));
    acc += qa_ * (1 - qb_) * psi_a_->adjoint_apply(log2_psd(q2.op));
  }
  if ((1 - qa_) * qb_ > 0) {
    const auto& q3 = std::get<QuantumBlock>(bl[njoint + 2]);
    const auto& q4 = std::get<QuantumBlock>(bl[njoint + 3]);
    acc += (1 - qa_) * qb_ * phi_bbar_->adjoint_apply(log2_psd(q3.op));
    acc += (1 - qa_) * qb_ * phi_b_->adjoint_apply(log2_psd(q4.op));
  }
  if (qa_ * qb_ > 0) {
    const auto& c = std::get<ClassicalBlock>(bl[njoint + 4]);
    const auto& u1 = std::get<UniformClassicalBlock>(bl[njoint + 5]);
    const auto& u2 = std::get<UniformClassicalBlock>(bl[njoint + 6]);
    const auto& u3 = std::get<UniformClassicalBlock>(bl[njoint + 7]);
    acc += qa_ * qb_ * safe_log2(c.v(0)) * ((id - a_op_) * (id - b_op_));
    acc += qa_ * qb_ * safe_log2(u1.weight / e) * ((id - a_op_) * b_op_);
    acc += qa_ * qb_ * safe_log2(u2.weight / d) * (a_op_ * (id - b_op_));
    acc += qa_ * qb_ * safe_log2(u3.weight / (d * e)) * (a_op_ * b_op_);
  }
  return hermitize(acc);
}

std::shared_ptr<const TildeTensorChannel> tensor_tilde(
    std::shared_ptr<const ShorTildeChannel> left,
    std::shared_ptr<const ShorTildeChannel> right) {
  return std::make_shared<TildeTensorChannel>(std::move(left), std::move(right));
}

}  // namespace qclab
