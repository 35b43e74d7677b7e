#include "doctest.h"

#include <cmath>

#include "core/solvers.hpp"
#include "test_util.hpp"

using namespace qclab;
using namespace qct;

namespace {

SolveOptions quick_opts(std::uint64_t seed = 1, int restarts = 8) {
  SolveOptions o;
  o.restarts = restarts;
  o.max_iters = 300;
  o.seed = seed;
  return o;
}

// Wootters concurrence closed form; the independent EoF oracle for 2 (x) 2.
double eof_concurrence_oracle(const Mat& sigma) {
  Mat sy(2, 2);
  sy << 0, Cplx(0, -1), Cplx(0, 1), 0;
  Mat yy = kron(sy, sy);
  Mat m = sigma * yy * sigma.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(m);
  std::vector<double> lam;
  for (Eigen::Index i = 0; i < 4; ++i)
    lam.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  const double c = std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
  return h2(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

}  // namespace

TEST_CASE("chi_function pinned values") {
  auto id2 = identity_channel(2);
  SolveReport rep = chi_function(id2, DensityMatrix(maximally_mixed(2)),
                                 quick_opts(2));
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rep.convex_closure == doctest::Approx(0.0).epsilon(1e-7));

  auto dep1 = depolarizing_channel(1.0);
  SolveReport flat = chi_function(dep1, random_state(2, 2, 3), quick_opts(3));
  CHECK(flat.value == doctest::Approx(0.0).epsilon(1e-9));

  // Pure average: unique decomposition, chi = 0.
  SolveReport pure = chi_function(id2, DensityMatrix(plus_state()), quick_opts());
  CHECK(pure.value == 0.0);
  CHECK(pure.convex_closure == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("chi_function matches the brute-force decomposition oracle") {
  // Frozen oracle: 1e6 random 4-member pure decompositions of I/2 through
  // amplitude_damping(0.3) gave chi = 0.624380529 (seed 20240817).
  const double frozen = 0.624380529;
  auto ad = amplitude_damping_channel(0.3);
  SolveReport rep =
      chi_function(ad, DensityMatrix(maximally_mixed(2)), quick_opts(5, 12));
  CHECK(std::abs(rep.value - frozen) < 1e-3);
  CHECK(rep.value >= frozen - 1e-6);  // solver should dominate random search

  // A small fresh random-search pass stays below the solver value.
  Rng rng(7);
  const double h_out = ad->apply(maximally_mixed(2)).entropy();
  double best = 0.0;
  for (int s = 0; s < 20000; ++s) {
    Ensemble e = hjw_ensemble(DensityMatrix(maximally_mixed(2)), 4,
                              haar_isometry(rng, 4, 2));
    double members = 0.0;
    for (const auto& it : e.items())
      members += it.p * ad->apply(it.state.matrix()).entropy();
    best = std::max(best, h_out - members);
  }
  CHECK(best <= rep.value + 1e-6);
}

TEST_CASE("chi argmax is a valid decomposition of rho") {
  auto ad = amplitude_damping_channel(0.4);
  DensityMatrix rho = random_state(2, 2, 11);
  SolveReport rep = chi_function(ad, rho, quick_opts(11, 6));
  REQUIRE(rep.argmax.has_value());
  CHECK(max_abs(average_state(*rep.argmax).matrix() - rho.matrix()) < 1e-9);
  CHECK(holevo_quantity(*ad, *rep.argmax) == doctest::Approx(rep.value).epsilon(1e-10));
}

TEST_CASE("constrained_capacity pinned values") {
  auto id2 = identity_channel(2);

  SolveReport un = constrained_capacity(
      id2, ConstraintSet::full_simplex(2), quick_opts(13));
  CHECK(un.value == doctest::Approx(1.0).epsilon(1e-6));

  // Only rho = |1><1| is feasible.
  SolveReport pin = constrained_capacity(
      id2, ConstraintSet::linear(2, {{proj0(), 0.0}}), quick_opts(17));
  CHECK(pin.value == doctest::Approx(0.0).epsilon(1e-4));

  // Tr diag(1,0) rho <= 1/4: the one-dimensional oracle max of h2(a), a <= 1/4.
  SolveReport h14 = constrained_capacity(
      id2, ConstraintSet::linear(2, {{proj0(), 0.25}}), quick_opts(19));
  CHECK(h14.value == doctest::Approx(h2(0.25)).epsilon(1e-4));
  REQUIRE(h14.argmax.has_value());
  CHECK(ConstraintSet::linear(2, {{proj0(), 0.25}})
            .contains(average_state(*h14.argmax).matrix(), 1e-8));
}

TEST_CASE("constrained_capacity reduces to chi for fixed states") {
  auto ad = amplitude_damping_channel(0.3);
  DensityMatrix rho = random_state(2, 2, 23);
  SolveReport a = constrained_capacity(ad, ConstraintSet::fixed_state(rho),
                                       quick_opts(23, 6));
  SolveReport b = chi_function(ad, rho, quick_opts(23, 6));
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
}

TEST_CASE("min_output_entropy pinned and grid-checked") {
  CHECK(min_output_entropy(identity_channel(2), quick_opts(29)).value ==
        doctest::Approx(0.0).epsilon(1e-8));
  CHECK(min_output_entropy(depolarizing_channel(1.0), quick_opts(31)).value ==
        doctest::Approx(1.0).epsilon(1e-8));

  // Bloch-grid oracle for depolarizing(0.5): h2(1/4) = 0.811278124.
  SolveReport rep = min_output_entropy(depolarizing_channel(0.5), quick_opts(37));
  CHECK(std::abs(rep.value - 0.811278124) < 1e-4);
}

TEST_CASE("nu_h pinned values") {
  auto id2 = identity_channel(2);
  auto dep = depolarizing_channel(0.5);

  CHECK(nu_h(dep, Mat::Zero(2, 2), quick_opts(41)).value ==
        doctest::Approx(min_output_entropy(dep, quick_opts(41)).value)
            .epsilon(1e-8));

  CHECK(nu_h(id2, diag2(0.2, 0.7), quick_opts(43)).value ==
        doctest::Approx(0.2).epsilon(1e-6));

  // Depolarizing output entropy is input independent, so the grid oracle is
  // h2(1/4) + lambda_min(A).
  Mat a = diag2(0.9, 0.35);
  SolveReport rep = nu_h(dep, a, quick_opts(47));
  CHECK(std::abs(rep.value - (h2(0.25) + 0.35)) < 1e-4);

  Mat not_pos = diag2(1.0, -0.2);
  CHECK_THROWS_AS(nu_h(dep, not_pos, quick_opts()), Error);
}

TEST_CASE("conjugate_h pinned values and shift covariance") {
  auto id2 = identity_channel(2);
  CHECK(conjugate_h(id2, diag2(1, 3), quick_opts(53)).value ==
        doctest::Approx(3.0).epsilon(1e-6));

  auto dep1 = depolarizing_channel(1.0);
  CHECK(conjugate_h(dep1, diag2(0.4, 1.1), quick_opts(59)).value ==
        doctest::Approx(1.1 - 1.0).epsilon(1e-6));

  auto dep = depolarizing_channel(0.3);
  CHECK(conjugate_h(dep, Mat::Zero(2, 2), quick_opts(61)).value ==
        doctest::Approx(-min_output_entropy(dep, quick_opts(61)).value)
            .epsilon(1e-6));

  // H*(A + cI) = H*(A) + c.
  Rng rng(67);
  Mat x = hermitize(ginibre(rng, 2, 2));
  const double c = 0.77;
  const double base = conjugate_h(dep, x, quick_opts(67)).value;
  const double shifted =
      conjugate_h(dep, Mat(x + c * Mat::Identity(2, 2)), quick_opts(67)).value;
  CHECK(shifted == doctest::Approx(base + c).epsilon(1e-5));
}

TEST_CASE("penalized_capacity pinned values") {
  auto id2 = identity_channel(2);

  SolveReport p0 = penalized_capacity(id2, proj0(), 0.0, quick_opts(71));
  CHECK(p0.value == doctest::Approx(1.0).epsilon(1e-6));

  SolveReport pi1 = penalized_capacity(id2, Mat::Identity(2, 2), 1.0,
                                       quick_opts(73));
  CHECK(pi1.value == doctest::Approx(2.0).epsilon(1e-6));

  // One-dimensional oracle: max_a h2(a) + a = log2 3.
  SolveReport plog3 = penalized_capacity(id2, proj0(), 1.0, quick_opts(79));
  CHECK(plog3.value == doctest::Approx(std::log2(3.0)).epsilon(1e-4));
}

TEST_CASE("certify_optimal accepts the optimum and rejects a bad ensemble") {
  auto id2 = identity_channel(2);
  Ensemble eigen_e({{0.5, DensityMatrix(proj0())}, {0.5, DensityMatrix(proj1())}});

  SolveOptions adv = quick_opts(83, 64);
  Certificate good = certify_optimal(id2, ConstraintSet::full_simplex(2),
                                     eigen_e, 1e-4, adv);
  CHECK(good.passed);
  CHECK(good.adversary_value == doctest::Approx(1.0).epsilon(1e-5));

  Ensemble bad({{1.0, DensityMatrix(proj0())}});
  Certificate fail = certify_optimal(id2, ConstraintSet::full_simplex(2), bad,
                                     1e-4, adv);
  CHECK_FALSE(fail.passed);
  CHECK(fail.worst_violation > 1.0);
  CHECK(fail.witness.has_value());

  Certificate fixed = certify_optimal(
      id2, ConstraintSet::fixed_state(DensityMatrix(maximally_mixed(2))),
      eigen_e, 1e-4, adv);
  CHECK(fixed.passed);

  // Average outside the set is a precondition error.
  CHECK_THROWS_AS(
      certify_optimal(id2,
                      ConstraintSet::fixed_state(DensityMatrix(plus_state())),
                      eigen_e, 1e-4, adv),
      Error);
}

TEST_CASE("certificates on random channels accept solver optima") {
  Rng rng(89);
  for (int trial = 0; trial < 3; ++trial) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    SolveReport cap = constrained_capacity(phi, ConstraintSet::full_simplex(2),
                                           quick_opts(rng.raw(), 12));
    REQUIRE(cap.argmax.has_value());
    Certificate cert = certify_optimal(phi, ConstraintSet::full_simplex(2),
                                       *cap.argmax, 1e-3,
                                       quick_opts(rng.raw(), 64));
    CHECK(cert.passed);
  }
}

TEST_CASE("kkt certificate on the pinned qubit example") {
  auto id2 = identity_channel(2);
  auto set = ConstraintSet::linear(2, {{proj0(), 0.25}});

  SolveOptions opts = quick_opts(97, 6);
  opts.max_iters = 250;
  Certificate cert = kkt_certificate(id2, set,
                                     DensityMatrix(diag2(0.25, 0.75)), 2e-3,
                                     opts);
  CHECK(cert.passed);
  REQUIRE(cert.multipliers.size() == 1);
  // Stationarity of h2(a) + p(1/4 - a) at a = 1/4 gives p = log2 3.
  CHECK(std::abs(cert.multipliers[0] - std::log2(3.0)) < 5e-3);

  // Inactive constraint: multiplier 0 and rho_av must already be optimal.
  auto loose = ConstraintSet::linear(2, {{proj0(), 0.9}});
  Certificate inact = kkt_certificate(id2, loose,
                                      DensityMatrix(maximally_mixed(2)), 2e-3,
                                      opts);
  CHECK(inact.passed);
  CHECK(inact.multipliers[0] == doctest::Approx(0.0));

  // Infeasible rho_av is a precondition error.
  CHECK_THROWS_AS(kkt_certificate(id2, set, DensityMatrix(diag2(0.5, 0.5)),
                                  2e-3, opts),
                  Error);
}

TEST_CASE("eof pinned values and concurrence oracle") {
  SolveOptions opts = quick_opts(101, 10);

  SolveReport bell = eof(DensityMatrix(bell_state()), 2, 2, opts);
  CHECK(bell.value == doctest::Approx(1.0).epsilon(1e-6));

  Mat prod = kron(plus_state(), proj0());
  SolveReport zero = eof(DensityMatrix(prod), 2, 2, opts);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-6));

  Rng rng(103);
  for (int trial = 0; trial < 6; ++trial) {
    DensityMatrix sigma = random_state(4, 1 + rng.below(4), rng.raw());
    SolveReport rep = eof(sigma, 2, 2, opts);
    CHECK(std::abs(rep.value - eof_concurrence_oracle(sigma.matrix())) < 1e-4);
  }

  CHECK_THROWS_AS(eof(DensityMatrix(maximally_mixed(4)), 3, 2, opts), Error);
}

TEST_CASE("chi is concave along random segments") {
  Rng rng(107);
  auto phi = amplitude_damping_channel(0.35);
  SolveOptions opts = quick_opts(107, 6);
  for (int trial = 0; trial < 3; ++trial) {
    DensityMatrix r1 = random_state(2, 2, rng.raw());
    DensityMatrix r2 = random_state(2, 2, rng.raw());
    const double lam = rng.uniform(0.2, 0.8);
    Mat mid = lam * r1.matrix() + (1 - lam) * r2.matrix();
    const double chi_mid = chi_function(phi, DensityMatrix(mid), opts).value;
    const double chi_ends = lam * chi_function(phi, r1, opts).value +
                            (1 - lam) * chi_function(phi, r2, opts).value;
    CHECK(chi_mid >= chi_ends - 2e-3);
  }
}

TEST_CASE("prop-2 estimate holds for solver optima") {
  // C(Phi; A) >= chi(rho) + S(Phi(rho) || Phi(rho_av)) for feasible rho.
  Rng rng(109);
  auto phi = random_channel(2, 2, 2, rng.raw());
  SolveOptions opts = quick_opts(109, 10);
  SolveReport cap = constrained_capacity(phi, ConstraintSet::full_simplex(2), opts);
  Mat av = average_state(*cap.argmax).matrix();
  for (int trial = 0; trial < 5; ++trial) {
    DensityMatrix rho = random_state(2, 2, rng.raw());
    const double chi_rho = chi_function(phi, rho, opts).value;
    const double dist = relative_entropy(phi->apply(rho.matrix()),
                                         phi->apply(av));
    CHECK(cap.value >= chi_rho + dist - 2e-3);
  }
}

TEST_CASE("lemma-1 monotonicity along nested constraint sets") {
  auto id2 = identity_channel(2);
  SolveOptions opts = quick_opts(113, 6);
  // A_m: Tr proj0 rho <= 0.1 + 1/m, shrinking to the 0.1 level set.
  double prev = kInf;
  for (int m : {1, 2, 8, 64, 1024}) {
    auto set = ConstraintSet::linear(2, {{proj0(), std::min(1.0, 0.1 + 1.0 / m)}});
    const double val = constrained_capacity(id2, set, opts).value;
    CHECK(val <= prev + 2e-3);
    prev = val;
  }
  const double limit =
      constrained_capacity(id2, ConstraintSet::linear(2, {{proj0(), 0.1}}), opts)
          .value;
  CHECK(std::abs(prev - limit) < 8e-3);
  CHECK(limit == doctest::Approx(h2(0.1)).epsilon(1e-3));
}

TEST_CASE("chi upper bounded by output entropy; nu_h by moe plus lambda_max") {
  Rng rng(127);
  auto phi = random_channel(2, 2, 3, rng.raw());
  SolveOptions opts = quick_opts(127, 6);
  DensityMatrix rho = random_state(2, 2, rng.raw());
  SolveReport chi = chi_function(phi, rho, opts);
  CHECK(chi.value <= phi->apply(rho.matrix()).entropy() + 1e-9);

  Mat g = ginibre(rng, 2, 2);
  Mat a = hermitize(g * g.adjoint());
  const double nu = nu_h(phi, a, opts).value;
  const double moe = min_output_entropy(phi, opts).value;
  CHECK(nu <= moe + eig_hermitian(a).values.maxCoeff() + 1e-6);
}
