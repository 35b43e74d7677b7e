#include "states.hpp"

#include <algorithm>
#include <cmath>

namespace qclab {

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

Ensemble::Ensemble(std::vector<Item> items) : items_(std::move(items)) {
  require(!items_.empty(), ErrorKind::validation, "ensemble must be nonempty");
  double total = 0.0;
  const Eigen::Index d = items_.front().state.dim();
  for (const auto& it : items_) {
    require(it.p >= -tol::prob_sum, ErrorKind::validation,
            "ensemble probability is negative");
    require(it.state.dim() == d, ErrorKind::validation,
            "ensemble states live on different spaces");
    total += it.p;
  }
  require(std::abs(total - 1.0) <= tol::prob_sum, ErrorKind::validation,
          "ensemble probabilities sum to " + std::to_string(total));
}

DensityMatrix average_state(const Ensemble& e) {
  Mat acc = Mat::Zero(e.dim(), e.dim());
  for (const auto& it : e.items()) acc += it.p * it.state.matrix();
  return DensityMatrix(acc);
}

Eigen::Index psd_rank(const PositiveOperator& op) {
  const double scale = std::max(1.0, op.spectrum().maxCoeff());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < op.spectrum().size(); ++i)
    if (op.spectrum()(i) > tol::kernel_eig * scale) ++r;
  return r;
}

Ensemble hjw_ensemble(const DensityMatrix& rho, Eigen::Index n, const Mat& mix) {
  const Eigen::Index r = psd_rank(rho);
  require(n >= r, ErrorKind::invalid_argument,
          "decomposition length n is below rank(rho)");
  require(mix.rows() == n && mix.cols() == r, ErrorKind::invalid_argument,
          "mix must be n x rank(rho)");
  const double iso_dev =
      (mix.adjoint() * mix - Mat::Identity(r, r)).cwiseAbs().maxCoeff();
  require(iso_dev <= 1e-10, ErrorKind::invalid_argument,
          "mix columns are not orthonormal (deviation " +
              std::to_string(iso_dev) + ")");

  // Columns of R span supp(rho) scaled by sqrt eigenvalues (descending order
  // irrelevant; we take the top-r of the ascending spectrum).
  Mat big_r(rho.dim(), r);
  Eigen::Index c = 0;
  const double scale = std::max(1.0, rho.spectrum().maxCoeff());
  for (Eigen::Index i = 0; i < rho.spectrum().size(); ++i) {
    if (rho.spectrum()(i) > tol::kernel_eig * scale)
      big_r.col(c++) = std::sqrt(rho.spectrum()(i)) * rho.eigenvectors().col(i);
  }

  std::vector<Ensemble::Item> items;
  for (Eigen::Index i = 0; i < n; ++i) {
    CVec psi = big_r * mix.row(i).transpose();
    const double p = psi.squaredNorm();
    if (p < 1e-14) continue;
    items.push_back({p, DensityMatrix(Mat(psi * psi.adjoint() / p))});
  }
  require(!items.empty(), ErrorKind::numerical, "all decomposition weights vanished");
  return Ensemble(std::move(items));
}

DensityMatrix random_state(Eigen::Index dim, Eigen::Index rank,
                           std::uint64_t seed) {
  require(rank >= 1 && rank <= dim, ErrorKind::invalid_argument,
          "random_state: need 1 <= rank <= dim");
  Rng rng(seed);
  Mat g = ginibre(rng, dim, rank);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

Ensemble random_ensemble(Eigen::Index dim, Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::invalid_argument, "ensemble size must be >= 1");
  Rng rng(seed);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  std::vector<Ensemble::Item> items;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Mix of pure and full-rank members keeps sweeps varied.
    const Eigen::Index rank = (rng.uniform() < 0.5) ? 1 : dim;
    items.push_back({w[i] / total, random_state(dim, rank, rng.raw())});
  }
  return Ensemble(std::move(items));
}

// ---------------------------------------------------------------------------
// BlockOperator
// ---------------------------------------------------------------------------

BlockOperator BlockOperator::quantum(Mat m) {
  BlockOperator out;
  out.append(QuantumBlock{std::move(m), 1});
  return out;
}

BlockOperator& BlockOperator::append(Block b) {
  blocks_.push_back(std::move(b));
  return *this;
}

double BlockOperator::trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) {
    if (const auto* q = std::get_if<QuantumBlock>(&b))
      t += static_cast<double>(q->mult) * q->op.trace().real();
    else if (const auto* c = std::get_if<ClassicalBlock>(&b))
      t += c->v.sum();
    else
      t += std::get<UniformClassicalBlock>(b).weight;
  }
  return t;
}

double BlockOperator::entropy() const {
  double h = 0.0;
  for (const auto& b : blocks_) {
    if (const auto* q = std::get_if<QuantumBlock>(&b)) {
      h += static_cast<double>(q->mult) * entropy_of(q->op);
    } else if (const auto* c = std::get_if<ClassicalBlock>(&b)) {
      for (Eigen::Index i = 0; i < c->v.size(); ++i) h += eta(c->v(i));
    } else {
      const auto& u = std::get<UniformClassicalBlock>(b);
      // m entries of w/m: -w log2(w/m) = eta(w) + w log2 m, never materialized.
      h += eta(u.weight) + u.weight * std::log2(static_cast<double>(u.mult));
    }
  }
  return h;
}

BlockOperator& BlockOperator::scale(double s) {
  for (auto& b : blocks_) {
    if (auto* q = std::get_if<QuantumBlock>(&b))
      q->op *= s;
    else if (auto* c = std::get_if<ClassicalBlock>(&b))
      c->v *= s;
    else
      std::get<UniformClassicalBlock>(b).weight *= s;
  }
  return *this;
}

namespace {

[[noreturn]] void shape_mismatch() {
  fail(ErrorKind::invalid_argument, "block operators have different shapes");
}

void check_same_shape(const Block& a, const Block& b) {
  if (a.index() != b.index()) shape_mismatch();
  if (const auto* qa = std::get_if<QuantumBlock>(&a)) {
    const auto& qb = std::get<QuantumBlock>(b);
    if (qa->op.rows() != qb.op.rows() || qa->mult != qb.mult) shape_mismatch();
  } else if (const auto* ca = std::get_if<ClassicalBlock>(&a)) {
    if (ca->v.size() != std::get<ClassicalBlock>(b).v.size()) shape_mismatch();
  } else {
    if (std::get<UniformClassicalBlock>(a).mult !=
        std::get<UniformClassicalBlock>(b).mult)
      shape_mismatch();
  }
}

}  // namespace

BlockOperator& BlockOperator::add_scaled(const BlockOperator& other, double s) {
  if (blocks_.empty()) {
    *this = other;
    return scale(s);
  }
  require(blocks_.size() == other.blocks_.size(), ErrorKind::invalid_argument,
          "block operators have different shapes");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    check_same_shape(blocks_[i], other.blocks_[i]);
    if (auto* q = std::get_if<QuantumBlock>(&blocks_[i]))
      q->op += s * std::get<QuantumBlock>(other.blocks_[i]).op;
    else if (auto* c = std::get_if<ClassicalBlock>(&blocks_[i]))
      c->v += s * std::get<ClassicalBlock>(other.blocks_[i]).v;
    else
      std::get<UniformClassicalBlock>(blocks_[i]).weight +=
          s * std::get<UniformClassicalBlock>(other.blocks_[i]).weight;
  }
  return *this;
}

bool BlockOperator::is_single_quantum() const {
  return blocks_.size() == 1 && std::holds_alternative<QuantumBlock>(blocks_[0]) &&
         std::get<QuantumBlock>(blocks_[0]).mult == 1;
}

const Mat& BlockOperator::as_quantum() const {
  require(is_single_quantum(), ErrorKind::invalid_argument,
          "block operator is not a single quantum block");
  return std::get<QuantumBlock>(blocks_[0]).op;
}

RVec BlockOperator::concatenated_spectrum(std::uint64_t cap) const {
  std::uint64_t total = 0;
  for (const auto& b : blocks_) {
    if (const auto* q = std::get_if<QuantumBlock>(&b))
      total += q->mult * static_cast<std::uint64_t>(q->op.rows());
    else if (const auto* c = std::get_if<ClassicalBlock>(&b))
      total += static_cast<std::uint64_t>(c->v.size());
    else
      total += std::get<UniformClassicalBlock>(b).mult;
  }
  require(total <= cap, ErrorKind::invalid_argument,
          "refusing to materialize " + std::to_string(total) + " entries");

  RVec out(static_cast<Eigen::Index>(total));
  Eigen::Index pos = 0;
  for (const auto& b : blocks_) {
    if (const auto* q = std::get_if<QuantumBlock>(&b)) {
      auto es = eig_hermitian(hermitize(q->op));
      for (std::uint64_t rep = 0; rep < q->mult; ++rep)
        for (Eigen::Index i = 0; i < es.values.size(); ++i)
          out(pos++) = std::max(0.0, es.values(i));
    } else if (const auto* c = std::get_if<ClassicalBlock>(&b)) {
      for (Eigen::Index i = 0; i < c->v.size(); ++i) out(pos++) = c->v(i);
    } else {
      const auto& u = std::get<UniformClassicalBlock>(b);
      const double each = u.weight / static_cast<double>(u.mult);
      for (std::uint64_t i = 0; i < u.mult; ++i) out(pos++) = each;
    }
  }
  return out;
}

double BlockOperator::max_abs_diff(const BlockOperator& other) const {
  require(blocks_.size() == other.blocks_.size(), ErrorKind::invalid_argument,
          "block operators have different shapes");
  double dev = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    check_same_shape(blocks_[i], other.blocks_[i]);
    if (const auto* q = std::get_if<QuantumBlock>(&blocks_[i]))
      dev = std::max(dev, (q->op - std::get<QuantumBlock>(other.blocks_[i]).op)
                              .cwiseAbs()
                              .maxCoeff());
    else if (const auto* c = std::get_if<ClassicalBlock>(&blocks_[i]))
      dev = std::max(dev, (c->v - std::get<ClassicalBlock>(other.blocks_[i]).v)
                              .cwiseAbs()
                              .maxCoeff());
    else
      dev = std::max(dev,
                     std::abs(std::get<UniformClassicalBlock>(blocks_[i]).weight -
                              std::get<UniformClassicalBlock>(other.blocks_[i])
                                  .weight));
  }
  return dev;
}

double relative_entropy(const BlockOperator& a, const BlockOperator& b) {
  require(a.blocks().size() == b.blocks().size(), ErrorKind::invalid_argument,
          "block operators have different shapes");
  double total = 0.0;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) {
    check_same_shape(a.blocks()[i], b.blocks()[i]);
    const Block& ba = a.blocks()[i];
    const Block& bb = b.blocks()[i];
    if (const auto* qa = std::get_if<QuantumBlock>(&ba)) {
      const auto& qb = std::get<QuantumBlock>(bb);
      const double s =
          relative_entropy(PositiveOperator(qa->op), PositiveOperator(qb.op));
      if (std::isinf(s)) return kInf;
      total += static_cast<double>(qa->mult) * s;
    } else if (const auto* ca = std::get_if<ClassicalBlock>(&ba)) {
      const auto& cb = std::get<ClassicalBlock>(bb);
      for (Eigen::Index k = 0; k < ca->v.size(); ++k) {
        const double t = ca->v(k), s = cb.v(k);
        if (t <= tol::zero_eig) continue;
        if (s <= tol::zero_eig) {
          if (t > tol::support_mass) return kInf;
          continue;
        }
        total += t * std::log2(t / s);
      }
    } else {
      const auto& ua = std::get<UniformClassicalBlock>(ba);
      const auto& ub = std::get<UniformClassicalBlock>(bb);
      if (ua.weight <= tol::zero_eig) continue;
      if (ub.weight <= tol::zero_eig) return kInf;
      total += ua.weight * std::log2(ua.weight / ub.weight);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// HybridState
// ---------------------------------------------------------------------------

HybridState::HybridState(std::vector<Mat> parts) : parts_(std::move(parts)) {
  require(!parts_.empty(), ErrorKind::validation, "hybrid state needs >= 1 slot");
  const Eigen::Index d = parts_.front().rows();
  double total = 0.0;
  for (const auto& p : parts_) {
    require(p.rows() == d && p.cols() == d, ErrorKind::validation,
            "hybrid state parts live on different spaces");
    total += p.trace().real();
  }
  require(std::abs(total - 1.0) <= tol::trace_one, ErrorKind::validation,
          "hybrid state total trace " + std::to_string(total) + " is not 1");
}

HybridState HybridState::delta(const Mat& sigma, std::size_t j, std::size_t d) {
  require(j < d, ErrorKind::invalid_argument, "slot index out of range");
  std::vector<Mat> parts(d, Mat::Zero(sigma.rows(), sigma.cols()));
  parts[j] = sigma;
  return HybridState(std::move(parts));
}

Mat HybridState::flatten() const {
  Mat acc = Mat::Zero(dim(), dim());
  for (const auto& p : parts_) acc += p;
  return acc;
}

DensityMatrix HybridState::flatten_state() const {
  return DensityMatrix(flatten());
}

}  // namespace qclab
