#pragma once

#include <random>

#include "common.hpp"

namespace qclab {

// Deterministic random source. All distributions are derived from the raw
// mt19937_64 stream by hand so that a seed maps to the same values on every
// platform (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  Cplx cnormal() { return {normal(), normal()}; }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Independent child stream; used to give parallel tasks stable seeds.
  Rng fork(std::uint64_t salt) {
    return Rng(gen_() ^ (salt * 0x9e3779b97f4a7c15ull));
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Ginibre matrix: iid complex standard normal entries.
Mat ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols);

// Haar-distributed unitary via QR of a Ginibre matrix.
Mat haar_unitary(Rng& rng, Eigen::Index dim);

// rows x cols matrix with orthonormal columns (rows >= cols).
Mat haar_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace qclab
