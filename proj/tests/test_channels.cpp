#include "doctest.h"

#include <cmath>

#include "core/channels.hpp"
#include "test_util.hpp"

using namespace qclab;
using namespace qct;

TEST_CASE("constructor pinned behaviour") {
  auto dep1 = depolarizing_channel(1.0);
  Mat rho = random_state(2, 2, 4).matrix();
  CHECK(max_abs(as_kraus(*dep1).apply_mat(rho) - maximally_mixed(2)) < 1e-12);

  auto ptr = partial_trace_channel(2, 2, KeepFactor::first);
  CHECK(max_abs(as_kraus(*ptr).apply_mat(bell_state()) - maximally_mixed(2)) <
        1e-12);

  auto id3 = identity_channel(3);
  CHECK(as_kraus(*id3).kraus().size() == 1);
  Mat any = random_state(3, 2, 6).matrix();
  CHECK(max_abs(as_kraus(*id3).apply_mat(any) - any) < 1e-12);
}

TEST_CASE("apply pinned and trace oracle") {
  auto dep = depolarizing_channel(0.3);
  CHECK(max_abs(as_kraus(*dep).apply_mat(proj0()) - diag2(1 - 0.15, 0.15)) <
        1e-12);

  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto phi = random_channel(3, 2, 4, rng.raw());
    Mat rho = random_state(3, 3, rng.raw()).matrix();
    Mat out = as_kraus(*phi).apply_mat(rho);
    CHECK(out.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    // Output positivity.
    PositiveOperator pos(out);
    CHECK(pos.spectrum().minCoeff() >= 0.0);
  }
}

TEST_CASE("kraus completeness is enforced") {
  std::vector<Mat> bad = {0.9 * Mat::Identity(2, 2)};
  CHECK_THROWS_AS(kraus_channel(bad), Error);
}

TEST_CASE("povm must sum to identity") {
  std::vector<Mat> povm = {0.6 * Mat::Identity(2, 2), 0.3 * Mat::Identity(2, 2)};
  std::vector<Mat> outs = {proj0(), proj1()};
  CHECK_THROWS_AS(cq_channel(povm, outs), Error);
}

TEST_CASE("tensor products of channels") {
  auto id2 = identity_channel(2);
  auto joint = tensor_channels(id2, id2);
  Mat sigma = random_state(4, 4, 10).matrix();
  CHECK(max_abs(as_kraus(*joint).apply_mat(sigma) - sigma) < 1e-12);

  Rng rng(12);
  auto phi = random_channel(2, 2, 2, rng.raw());
  auto psi = random_channel(3, 2, 3, rng.raw());
  auto tp = tensor_channels(phi, psi);
  CHECK(tp->input_dim() == 6);
  CHECK(as_kraus(*tp).output_dim() == 4);

  // Factor-wise oracle on product inputs.
  Mat rho = random_state(2, 2, rng.raw()).matrix();
  Mat tau = random_state(3, 3, rng.raw()).matrix();
  Mat lhs = as_kraus(*tp).apply_mat(kron(rho, tau));
  Mat rhs = kron(as_kraus(*phi).apply_mat(rho), as_kraus(*psi).apply_mat(tau));
  CHECK(max_abs(lhs - rhs) < 1e-10);
}

TEST_CASE("direct sum mixtures obey the block entropy identity") {
  auto id2 = identity_channel(2);

  auto half = direct_sum_mixture({id2, id2}, {0.5, 0.5});
  CHECK(half->apply(maximally_mixed(2)).entropy() ==
        doctest::Approx(2.0).epsilon(1e-12));

  auto degen = direct_sum_mixture({id2, depolarizing_channel(1.0)}, {1.0, 0.0});
  Mat rho = random_state(2, 2, 14).matrix();
  CHECK(degen->apply(rho).entropy() ==
        doctest::Approx(entropy_of(rho)).epsilon(1e-10));

  // Random 3-way mixture: H(Phi(w)) = H({q}) + sum q_j H(Phi_j(w)).
  Rng rng(16);
  std::vector<ChannelPtr> comps = {identity_channel(2),
                                   random_channel(2, 2, 2, rng.raw()),
                                   random_channel(2, 3, 2, rng.raw())};
  std::vector<double> probs = {0.2, 0.5, 0.3};
  auto mix = direct_sum_mixture(comps, probs);
  for (int trial = 0; trial < 5; ++trial) {
    Mat w = random_state(2, 2, rng.raw()).matrix();
    double expected = 0.0;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      expected += eta(probs[j]);
      expected += probs[j] * comps[j]->apply(w).entropy();
    }
    CHECK(mix->apply(w).entropy() == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("holevo quantity pinned values") {
  auto id2 = identity_channel(2);
  Ensemble basis({{0.5, DensityMatrix(proj0())}, {0.5, DensityMatrix(proj1())}});
  CHECK(holevo_quantity(*id2, basis) == doctest::Approx(1.0).epsilon(1e-12));

  auto phi = random_channel(2, 2, 3, 21);
  Ensemble single({{1.0, random_state(2, 2, 22)}});
  CHECK(holevo_quantity(*phi, single) == doctest::Approx(0.0).epsilon(1e-10));

  Ensemble four({{0.25, DensityMatrix(proj0())},
                 {0.25, DensityMatrix(proj1())},
                 {0.25, DensityMatrix(plus_state())},
                 {0.25, DensityMatrix(minus_state())}});
  CHECK(holevo_quantity(*id2, four) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("holevo quantity equals the relative entropy form") {
  Rng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    Ensemble e = random_ensemble(2, 4, rng.raw());
    BlockOperator avg_out = phi->apply(average_state(e).matrix());
    double sum = 0.0;
    for (const auto& it : e.items())
      sum += it.p * relative_entropy(phi->apply(it.state.matrix()), avg_out);
    CHECK(holevo_quantity(*phi, e) == doctest::Approx(sum).epsilon(1e-9));
  }
}

TEST_CASE("donald residual vanishes") {
  auto phi = random_channel(2, 2, 2, 30);
  Ensemble e = random_ensemble(2, 3, 31);

  CHECK(std::abs(donald_residual(*phi, e, average_state(e))) < 1e-10);

  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    auto chan = random_channel(2 + rng.below(2), 2 + rng.below(2), 3, rng.raw());
    Ensemble ens = random_ensemble(chan->input_dim(), 4, rng.raw());
    DensityMatrix omega =
        random_state(chan->input_dim(), chan->input_dim(), rng.raw());
    CHECK(std::abs(donald_residual(*chan, ens, omega)) < 1e-8);
  }

  Ensemble single({{1.0, random_state(2, 2, 40)}});
  DensityMatrix omega = random_state(2, 2, 41);
  CHECK(std::abs(donald_residual(*phi, single, omega)) < 1e-10);
}

TEST_CASE("mixed-ensemble double inequality") {
  // eta [sum mu_j S(Phi(w_j)||Phi(rho_av^eta)) - chi] <= chi^eta - chi
  //   <= eta [sum mu_j S(Phi(w_j)||Phi(rho_av)) - chi]
  Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    Ensemble e = random_ensemble(2, 3, rng.raw());
    Ensemble f = random_ensemble(2, 3, rng.raw());
    const double chi = holevo_quantity(*phi, e);
    for (int step = 1; step <= 10; ++step) {
      const double etaw = 0.1 * step;
      std::vector<Ensemble::Item> mixed;
      for (const auto& it : e.items()) mixed.push_back({(1 - etaw) * it.p, it.state});
      for (const auto& it : f.items()) mixed.push_back({etaw * it.p, it.state});
      Ensemble both(mixed);
      const double chi_eta = holevo_quantity(*phi, both);

      BlockOperator out_av = phi->apply(average_state(e).matrix());
      BlockOperator out_av_eta = phi->apply(average_state(both).matrix());
      double d_eta = 0.0, d0 = 0.0;
      for (const auto& it : f.items()) {
        BlockOperator y = phi->apply(it.state.matrix());
        d_eta += it.p * relative_entropy(y, out_av_eta);
        d0 += it.p * relative_entropy(y, out_av);
      }
      CHECK(chi_eta - chi >= etaw * (d_eta - chi) - 1e-9);
      CHECK(chi_eta - chi <= etaw * (d0 - chi) + 1e-9);
    }
  }
}

TEST_CASE("psi_sub_a pinned and trace identity") {
  Rng rng(50);
  auto psi = random_channel(2, 2, 2, rng.raw());

  // A = I reproduces Psi acting on the K marginal.
  auto full = psi_sub_a(psi, Mat::Identity(2, 2));
  Mat sigma = random_state(4, 4, rng.raw()).matrix();
  Mat expect = as_kraus(*psi).apply_mat(partial_trace(sigma, 2, 2,
                                                      KeepFactor::second));
  CHECK(max_abs(full->apply_mat(sigma) - expect) < 1e-10);

  // A = 0 annihilates.
  auto zero = psi_sub_a(psi, Mat::Zero(2, 2));
  CHECK(max_abs(zero->apply_mat(sigma)) < 1e-12);

  // Tr Psi_A(sigma) = Tr (A (x) I) sigma for random A.
  for (int trial = 0; trial < 10; ++trial) {
    Mat g = ginibre(rng, 2, 2);
    Mat a = g * g.adjoint();
    a /= (eig_hermitian(a).values.maxCoeff() * 1.5);
    auto pa = psi_sub_a(psi, a);
    Mat s = random_state(4, 4, rng.raw()).matrix();
    const double lhs = pa->apply_mat(s).trace().real();
    const double rhs = (kron(a, Mat::Identity(2, 2)) * s).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }

  CHECK_THROWS_AS(psi_sub_a(psi, Mat(2.0 * Mat::Identity(2, 2))), Error);
}

TEST_CASE("measurement outcomes and the GLO inequality") {
  Mat basis = Mat::Identity(2, 2);

  // Product state with rho diagonal in the basis.
  Mat rho = diag2(0.7, 0.3);
  Mat tau = random_state(2, 2, 60).matrix();
  auto outcomes = measure_first_factor(kron(rho, tau), basis, 2);
  REQUIRE(outcomes.size() == 2);
  CHECK(outcomes[0].first == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(max_abs(outcomes[0].second - kron(proj0(), tau)) < 1e-10);

  // Bell state measured in the computational basis: two outcomes of 1/2.
  auto bell_out = measure_first_factor(bell_state(), basis, 2);
  REQUIRE(bell_out.size() == 2);
  CHECK(bell_out[0].first == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bell_out[1].first == doctest::Approx(0.5).epsilon(1e-12));

  // Entropy reduction by an efficient projective measurement:
  // sum_j p_j H(sigma_j) <= H(sigma).
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    Mat sigma = random_state(4, 4, rng.raw()).matrix();
    Mat u = haar_unitary(rng, 2);
    auto outs = measure_first_factor(sigma, u, 2);
    double after = 0.0;
    for (const auto& [p, st] : outs) after += p * entropy_of(st);
    CHECK(after <= entropy_of(sigma) + 1e-9);
  }

  Mat bad(2, 2);
  bad << 1, 0, 1, 0;
  CHECK_THROWS_AS(measure_first_factor(bell_state(), bad, 2), Error);
}

TEST_CASE("chi decomposes over direct sum mixtures") {
  Rng rng(70);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ChannelPtr> comps = {random_channel(2, 2, 2, rng.raw()),
                                     random_channel(2, 2, 3, rng.raw())};
    std::vector<double> probs = {0.35, 0.65};
    auto mix = direct_sum_mixture(comps, probs);
    Ensemble e = random_ensemble(2, 4, rng.raw());
    const double whole = holevo_quantity(*mix, e);
    const double parts = probs[0] * holevo_quantity(*comps[0], e) +
                         probs[1] * holevo_quantity(*comps[1], e);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-10));
  }
}

TEST_CASE("entropy gradients match finite differences") {
  Rng rng(80);
  for (int trial = 0; trial < 5; ++trial) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    Mat rho = random_state(2, 2, rng.raw()).matrix();
    auto [h, grad] = phi->output_entropy_grad(rho);
    CHECK(h == doctest::Approx(phi->output_entropy(rho)).epsilon(1e-12));

    const double eps = 1e-6;
    for (int dir = 0; dir < 3; ++dir) {
      Mat g = ginibre(rng, 2, 2);
      Mat delta = hermitize(g);
      const double fd = (phi->output_entropy(rho + eps * delta) -
                         phi->output_entropy(rho - eps * delta)) /
                        (2 * eps);
      const double an = (grad * delta).trace().real();
      CHECK(fd == doctest::Approx(an).epsilon(1e-5));
    }
  }
}
