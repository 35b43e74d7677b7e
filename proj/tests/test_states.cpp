#include "doctest.h"

#include <cmath>

#include "core/states.hpp"
#include "test_util.hpp"

using namespace qclab;
using namespace qct;

TEST_CASE("average_state pinned and oracle checked") {
  DensityMatrix rho = random_state(2, 2, 1);
  Ensemble single({{1.0, rho}});
  CHECK(max_abs(average_state(single).matrix() - rho.matrix()) < 1e-12);

  Ensemble pair({{0.5, DensityMatrix(proj0())}, {0.5, DensityMatrix(proj1())}});
  CHECK(max_abs(average_state(pair).matrix() - maximally_mixed(2)) < 1e-12);

  // Independent summation oracle on a random 5-member qubit ensemble.
  Ensemble e = random_ensemble(2, 5, 77);
  Mat acc = Mat::Zero(2, 2);
  for (const auto& it : e.items()) acc += it.p * it.state.matrix();
  CHECK(max_abs(average_state(e).matrix() - acc) < 1e-12);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(Ensemble({}), Error);
  CHECK_THROWS_AS(Ensemble({{0.7, DensityMatrix(proj0())},
                            {0.7, DensityMatrix(proj1())}}),
                  Error);
}

TEST_CASE("hjw eigen-decomposition with identity mix") {
  DensityMatrix rho(maximally_mixed(2));
  Ensemble e = hjw_ensemble(rho, 2, Mat::Identity(2, 2));
  REQUIRE(e.size() == 2);
  for (const auto& it : e.items()) {
    CHECK(it.p == doctest::Approx(0.5).epsilon(1e-12));
    // Members are the eigenprojectors of I/2, i.e. basis states.
    CHECK(std::abs(it.state.matrix()(0, 1)) < 1e-12);
  }
  CHECK(max_abs(average_state(e).matrix() - rho.matrix()) < 1e-10);
}

TEST_CASE("hjw on a pure state yields copies of it") {
  DensityMatrix rho(plus_state());
  Rng rng(3);
  Ensemble e = hjw_ensemble(rho, 3, haar_isometry(rng, 3, 1));
  for (const auto& it : e.items())
    CHECK(max_abs(it.state.matrix() - rho.matrix()) < 1e-10);
}

TEST_CASE("hjw recombines to the prescribed average") {
  DensityMatrix rho(diag2(0.75, 0.25));
  Rng rng(5);
  Ensemble e = hjw_ensemble(rho, 3, haar_isometry(rng, 3, 2));
  CHECK(max_abs(average_state(e).matrix() - rho.matrix()) < 1e-10);
}

TEST_CASE("hjw input validation") {
  DensityMatrix rho(maximally_mixed(2));
  Rng rng(9);
  CHECK_THROWS_AS(hjw_ensemble(rho, 1, haar_isometry(rng, 1, 1)), Error);
  Mat bad = Mat::Ones(3, 2);
  CHECK_THROWS_AS(hjw_ensemble(rho, 3, bad), Error);
}

TEST_CASE("hjw completeness: random isometries always reproduce rho") {
  Rng rng(123);
  for (Eigen::Index dim = 2; dim <= 4; ++dim) {
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix rho = random_state(dim, 1 + static_cast<Eigen::Index>(
                                                    rng.below(dim)),
                                       rng.raw());
      const Eigen::Index r = psd_rank(rho);
      const Eigen::Index n = dim * dim;
      Ensemble e = hjw_ensemble(rho, n, haar_isometry(rng, n, r));
      CHECK(max_abs(average_state(e).matrix() - rho.matrix()) < 1e-10);
    }
  }
}

TEST_CASE("random_state basics") {
  DensityMatrix pure = random_state(2, 1, 31);
  CHECK(entropy(pure) == doctest::Approx(0.0).epsilon(1e-9));

  DensityMatrix full = random_state(4, 4, 33);
  CHECK(entropy(full) > 0.0);

  DensityMatrix again = random_state(4, 4, 33);
  CHECK(max_abs(full.matrix() - again.matrix()) == 0.0);

  CHECK_THROWS_AS(random_state(2, 3, 1), Error);
}

TEST_CASE("hybrid state flattening is a density matrix") {
  HybridState h = HybridState::delta(plus_state(), 1, 3);
  DensityMatrix flat = h.flatten_state();
  CHECK(max_abs(flat.matrix() - plus_state()) < 1e-12);

  std::vector<Mat> parts = {0.25 * proj0(), 0.75 * plus_state()};
  HybridState mixed(parts);
  CHECK(mixed.flatten_state().trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("block operator entropy matches the concatenated spectrum") {
  BlockOperator b;
  b.append(QuantumBlock{0.3 * plus_state(), 1});
  b.append(ClassicalBlock{RVec::Constant(2, 0.2)});
  b.append(UniformClassicalBlock{0.3, 5});

  RVec spec = b.concatenated_spectrum();
  double direct = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) direct += eta(spec(i));
  CHECK(b.entropy() == doctest::Approx(direct).epsilon(1e-12));
  CHECK(b.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform classical block entropy stays closed-form for huge m") {
  const double w = 0.4;
  const std::uint64_t m = 1ull << 30;
  BlockOperator b;
  b.append(UniformClassicalBlock{w, m});
  b.append(ClassicalBlock{RVec::Constant(1, 0.6)});
  const double expected = w * std::log2(static_cast<double>(m)) -
                          w * std::log2(w) + eta(0.6);
  CHECK(b.entropy() == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(b.concatenated_spectrum(), Error);
}

TEST_CASE("blockwise relative entropy agrees with dense diagonal computation") {
  BlockOperator a, b;
  a.append(QuantumBlock{diag2(0.2, 0.1), 1});
  a.append(UniformClassicalBlock{0.7, 4});
  b.append(QuantumBlock{diag2(0.15, 0.15), 1});
  b.append(UniformClassicalBlock{0.7, 4});

  Mat da = Mat::Zero(6, 6), db = Mat::Zero(6, 6);
  da.topLeftCorner(2, 2) = diag2(0.2, 0.1);
  db.topLeftCorner(2, 2) = diag2(0.15, 0.15);
  for (int i = 2; i < 6; ++i) {
    da(i, i) = 0.7 / 4;
    db(i, i) = 0.7 / 4;
  }
  CHECK(relative_entropy(a, b) ==
        doctest::Approx(relative_entropy_of(da, db)).epsilon(1e-10));
}
