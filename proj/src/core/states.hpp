#pragma once

#include <variant>
#include <vector>

#include "rng.hpp"
#include "spectral.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

class Ensemble {
 public:
  struct Item {
    double p;
    DensityMatrix state;
  };

  explicit Ensemble(std::vector<Item> items);

  const std::vector<Item>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  Eigen::Index dim() const { return items_.front().state.dim(); }

 private:
  std::vector<Item> items_;
};

DensityMatrix average_state(const Ensemble& e);

// All length-n decompositions of rho: given an n x r matrix with orthonormal
// columns (r = rank rho), returns the ensemble of subnormalized vectors
// |psi_i> = sum_k mix(i,k) sqrt(lambda_k) |v_k>. Members with weight below
// 1e-14 are dropped.
Ensemble hjw_ensemble(const DensityMatrix& rho, Eigen::Index n, const Mat& mix);

Eigen::Index psd_rank(const PositiveOperator& op);

DensityMatrix random_state(Eigen::Index dim, Eigen::Index rank,
                           std::uint64_t seed);
Ensemble random_ensemble(Eigen::Index dim, Eigen::Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Block operators on direct sums of spaces
// ---------------------------------------------------------------------------

// A positive operator repeated `mult` times along the direct sum.
struct QuantumBlock {
  Mat op;
  std::uint64_t mult = 1;
};

// Explicit classical weights (diagonal block).
struct ClassicalBlock {
  RVec v;
};

// The classical uniform vector [w/m, ..., w/m], kept symbolic so m can be
// astronomically large.
struct UniformClassicalBlock {
  double weight = 0.0;
  std::uint64_t mult = 1;
};

using Block = std::variant<QuantumBlock, ClassicalBlock, UniformClassicalBlock>;

class BlockOperator {
 public:
  BlockOperator() = default;
  static BlockOperator quantum(Mat m);

  BlockOperator& append(Block b);
  const std::vector<Block>& blocks() const { return blocks_; }

  double trace() const;
  double entropy() const;  // concatenated-spectrum entropy, bits

  BlockOperator& scale(double s);
  // this += s * other; shapes must match block by block.
  BlockOperator& add_scaled(const BlockOperator& other, double s);

  bool is_single_quantum() const;
  const Mat& as_quantum() const;

  // Full spectrum as an explicit vector; refuses above the materialization cap.
  RVec concatenated_spectrum(std::uint64_t cap = 16384) const;

  // Max deviation from another block operator of identical shape.
  double max_abs_diff(const BlockOperator& other) const;

 private:
  std::vector<Block> blocks_;
};

// Blockwise Tr a (log2 a - log2 b); +inf when supports fail. Shapes must match.
double relative_entropy(const BlockOperator& a, const BlockOperator& b);

// ---------------------------------------------------------------------------
// Hybrid quantum-classical states: arrays {rho_j} with sum_j Tr rho_j = 1
// ---------------------------------------------------------------------------

class HybridState {
 public:
  HybridState(std::vector<Mat> parts);

  // sigma placed in slot j (0-based) of a length-d array.
  static HybridState delta(const Mat& sigma, std::size_t j, std::size_t d);

  const std::vector<Mat>& parts() const { return parts_; }
  std::size_t slots() const { return parts_.size(); }
  Eigen::Index dim() const { return parts_.front().rows(); }

  Mat flatten() const;  // sum of parts
  DensityMatrix flatten_state() const;

 private:
  std::vector<Mat> parts_;
};

}  // namespace qclab
