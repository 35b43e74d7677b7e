#include "doctest.h"

#include <cmath>

#include "core/rng.hpp"
#include "core/spectral.hpp"
#include "test_util.hpp"

using namespace qclab;
using namespace qct;

namespace {

// Index-contraction oracle for the partial trace, written independently of
// the implementation (marginal assembled entry by entry from scratch).
Mat partial_trace_oracle(const Mat& m, Eigen::Index dh, Eigen::Index dk,
                         bool keep_first) {
  const Eigen::Index dout = keep_first ? dh : dk;
  Mat out = Mat::Zero(dout, dout);
  for (Eigen::Index h = 0; h < dh; ++h)
    for (Eigen::Index hp = 0; hp < dh; ++hp)
      for (Eigen::Index k = 0; k < dk; ++k)
        for (Eigen::Index kp = 0; kp < dk; ++kp) {
          const Cplx val = m(h * dk + k, hp * dk + kp);
          if (keep_first && k == kp) out(h, hp) += val;
          if (!keep_first && h == hp) out(k, kp) += val;
        }
  return out;
}

}  // namespace

TEST_CASE("entropy on pinned spectra") {
  CHECK(entropy_of(diag2(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy_of(diag2(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));

  // Flat subnormalized spectrum saturates the bound TrS(log dim - log TrS).
  const double h = entropy_of(diag2(0.3, 0.3));
  CHECK(h == doctest::Approx(1.04218).epsilon(1e-5));
  CHECK(h == doctest::Approx(0.6 * (1.0 - std::log2(0.6))).epsilon(1e-12));
}

TEST_CASE("entropy rejects operators that are negative beyond the clamp") {
  CHECK_THROWS_AS(PositiveOperator(diag2(1.0, -1e-6)), Error);
  // Tiny negatives from rounding are clamped to zero.
  PositiveOperator ok(diag2(1.0, -5e-13));
  CHECK(ok.spectrum().minCoeff() == 0.0);
}

TEST_CASE("entropy bound holds for random subnormalized positive operators") {
  // 0 <= H(S) <= TrS (log dim - log TrS) for 0 <= S, Tr S <= 1.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.below(3));
    Mat g = ginibre(rng, dim, dim);
    Mat raw = g * g.adjoint();
    PositiveOperator s(Mat(raw * (rng.uniform(0.05, 1.0) / raw.trace().real())));
    const double h = entropy(s);
    const double tr = s.trace();
    CHECK(h >= -1e-12);
    CHECK(h <= tr * (std::log2(static_cast<double>(dim)) - std::log2(tr)) + 1e-9);
  }
}

TEST_CASE("entropy is unitarily invariant and additive over tensor products") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Mat rho = random_state(3, 3, rng.raw()).matrix();
    Mat u = haar_unitary(rng, 3);
    CHECK(entropy_of(Mat(u * rho * u.adjoint())) ==
          doctest::Approx(entropy_of(rho)).epsilon(1e-9));

    Mat tau = random_state(2, 2, rng.raw()).matrix();
    CHECK(entropy_of(kron(rho, tau)) ==
          doctest::Approx(entropy_of(rho) + entropy_of(tau)).epsilon(1e-9));
  }
}

TEST_CASE("relative entropy basics") {
  Mat rho = random_state(2, 2, 42).matrix();
  CHECK(relative_entropy_of(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(relative_entropy_of(proj0(), maximally_mixed(2)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(relative_entropy_of(maximally_mixed(2), proj0())));
  CHECK_THROWS_AS(relative_entropy_of(maximally_mixed(2), maximally_mixed(3)),
                  Error);
}

TEST_CASE("relative entropy nonnegative; zero iff states coincide") {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    Mat a = random_state(3, 3, rng.raw()).matrix();
    Mat b = random_state(3, 3, rng.raw()).matrix();
    const double s = relative_entropy_of(a, b);
    CHECK(s >= -1e-12);
    if (trace_distance_of(a, b) < 1e-8) CHECK(s < 1e-8);
    if (s == 0.0) CHECK(trace_distance_of(a, b) < 1e-8);
  }
}

TEST_CASE("pinsker floor in natural-log units") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.below(2));
    Mat a = random_state(dim, dim, rng.raw()).matrix();
    Mat b = random_state(dim, dim, rng.raw()).matrix();
    const double s_nats = relative_entropy_of(a, b) * std::log(2.0);
    const double t = trace_distance_of(a, b);
    CHECK(s_nats >= 0.5 * t * t - 1e-10);
  }
}

TEST_CASE("trace distance pinned values") {
  Mat rho = random_state(2, 2, 5).matrix();
  CHECK(trace_distance_of(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance_of(proj0(), proj1()) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(trace_distance_of(diag2(0.9, 0.1), maximally_mixed(2)) ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(trace_distance_of(proj0(), maximally_mixed(3)), Error);
}

TEST_CASE("partial trace pinned and oracle checked") {
  CHECK(max_abs(partial_trace(bell_state(), 2, 2, KeepFactor::first) -
                maximally_mixed(2)) < 1e-12);

  Mat rho = random_state(2, 2, 19).matrix();
  Mat tau = random_state(3, 3, 23).matrix();
  CHECK(max_abs(partial_trace(kron(rho, tau), 2, 3, KeepFactor::first) - rho) <
        1e-12);
  CHECK(max_abs(partial_trace(kron(rho, tau), 2, 3, KeepFactor::second) - tau) <
        1e-12);

  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    Mat sigma = random_state(6, 6, rng.raw()).matrix();
    Mat first = partial_trace(sigma, 2, 3, KeepFactor::first);
    Mat second = partial_trace(sigma, 2, 3, KeepFactor::second);
    CHECK(max_abs(first - partial_trace_oracle(sigma, 2, 3, true)) < 1e-12);
    CHECK(max_abs(second - partial_trace_oracle(sigma, 2, 3, false)) < 1e-12);
    CHECK(first.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(second.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  }

  CHECK_THROWS_AS(partial_trace(maximally_mixed(6), 4, 2, KeepFactor::first),
                  Error);
}

TEST_CASE("hermitian validation") {
  Mat bad(2, 2);
  bad << 1.0, Cplx(0.0, 1e-6), 0.0, 1.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, Error);
}
