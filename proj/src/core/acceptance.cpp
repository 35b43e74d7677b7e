#include "acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace qclab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat random_effect(Rng& rng, Eigen::Index dim) {
  Mat g = ginibre(rng, dim, dim);
  Mat e = g * g.adjoint();
  return e / (eig_hermitian(e).values.maxCoeff() * rng.uniform(1.05, 2.0));
}

// Wootters concurrence closed form: the independent oracle for two-qubit EoF.
double wootters_eof(const Mat& sigma) {
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

struct Sweep {
  ChannelPtr phi;
  Ensemble ensemble;
  DensityMatrix omega;
};

std::vector<Sweep> donald_sweep(int count, std::uint64_t seed) {
  std::vector<Sweep> out;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const Eigen::Index din = 2 + rng.below(2);
    const Eigen::Index dout = 2 + rng.below(2);
    auto phi = random_channel(din, dout, 2 + rng.below(2), rng.raw());
    Ensemble e = random_ensemble(din, 3 + rng.below(2), rng.raw());
    DensityMatrix omega = random_state(din, din, rng.raw());
    out.push_back({std::move(phi), std::move(e), std::move(omega)});
  }
  return out;
}

struct Budget {
  int id;
  std::string name;
  Clock::time_point t0 = Clock::now();
};

CriterionResult finish(const Budget& b, bool passed, const std::string& detail) {
  CriterionResult r;
  r.id = b.id;
  r.name = b.name;
  r.passed = passed;
  r.seconds = seconds_since(b.t0);
  r.detail = detail;
  return r;
}

// --------------------------------------------------------------------------

CriterionResult c1_donald(int) {
  Budget b{1, "donald-identity"};
  double worst = 0.0;
  for (const auto& s : donald_sweep(200, 0xD0A1D)) {
    worst = std::max(worst, std::abs(donald_residual(*s.phi, s.ensemble,
                                                     s.omega)));
  }
  const double secs = seconds_since(b.t0);
  std::ostringstream os;
  os << "worst |residual| = " << worst << ", " << secs << " s";
  return finish(b, worst < 1e-8 && secs < 10.0, os.str());
}

CriterionResult c2_chi_forms(int) {
  Budget b{2, "chi-relative-entropy-and-direct-sum"};
  double worst_rel = 0.0, worst_exp = 0.0;
  Rng mix_rng(0xC2);
  for (const auto& s : donald_sweep(200, 0xD0A1D)) {
    // Relative-entropy form.
    BlockOperator avg = s.phi->apply(average_state(s.ensemble).matrix());
    double sum = 0.0;
    for (const auto& it : s.ensemble.items())
      sum += it.p * relative_entropy(s.phi->apply(it.state.matrix()), avg);
    worst_rel = std::max(
        worst_rel, std::abs(holevo_quantity(*s.phi, s.ensemble) - sum));

    // Direct-sum decomposition on a two-component mixture.
    auto second = random_channel(s.phi->input_dim(), 2, 2, mix_rng.raw());
    const double w = mix_rng.uniform(0.2, 0.8);
    auto mixture = direct_sum_mixture({s.phi, second}, {w, 1.0 - w});
    const double whole = holevo_quantity(*mixture, s.ensemble);
    const double parts = w * holevo_quantity(*s.phi, s.ensemble) +
                         (1.0 - w) * holevo_quantity(*second, s.ensemble);
    worst_exp = std::max(worst_exp, std::abs(whole - parts));
  }
  std::ostringstream os;
  os << "worst relent-form dev = " << worst_rel
     << ", worst direct-sum dev = " << worst_exp;
  return finish(b, worst_rel < 1e-9 && worst_exp < 1e-9, os.str());
}

CriterionResult c3_double_inequality(int) {
  Budget b{3, "d-chi-double-inequality"};
  Rng rng(0xDC11);
  double worst_slack = kInf;
  for (int pair = 0; pair < 100; ++pair) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    Ensemble e = random_ensemble(2, 3, rng.raw());
    Ensemble f = random_ensemble(2, 3, rng.raw());
    const double chi = holevo_quantity(*phi, e);
    BlockOperator out_av = phi->apply(average_state(e).matrix());
    for (int step = 1; step <= 10; ++step) {
      const double etaw = 0.1 * step;
      std::vector<Ensemble::Item> mixed;
      for (const auto& it : e.items())
        mixed.push_back({(1 - etaw) * it.p, it.state});
      for (const auto& it : f.items()) mixed.push_back({etaw * it.p, it.state});
      Ensemble both(mixed);
      const double chi_eta = holevo_quantity(*phi, both);
      BlockOperator out_eta = phi->apply(average_state(both).matrix());
      double d_eta = 0.0, d0 = 0.0;
      for (const auto& it : f.items()) {
        BlockOperator y = phi->apply(it.state.matrix());
        d_eta += it.p * relative_entropy(y, out_eta);
        d0 += it.p * relative_entropy(y, out_av);
      }
      worst_slack = std::min(worst_slack,
                             (chi_eta - chi) - etaw * (d_eta - chi));
      worst_slack = std::min(worst_slack,
                             etaw * (d0 - chi) - (chi_eta - chi));
    }
  }
  std::ostringstream os;
  os << "worst slack = " << worst_slack;
  return finish(b, worst_slack >= -1e-9, os.str());
}

CriterionResult c4_certificates(int jobs) {
  Budget b{4, "prop1-certificates"};
  Rng rng(0xCE47);
  SolveOptions solve_opts;
  solve_opts.restarts = 16;
  solve_opts.jobs = jobs;
  SolveOptions adv_opts;
  adv_opts.restarts = 1000;
  adv_opts.max_iters = 200;
  adv_opts.jobs = jobs;

  bool ok = true;
  std::ostringstream os;
  int bad_rejected = 0;
  for (int i = 0; i < 25; ++i) {
    auto phi = random_channel(2, 2, 2 + rng.below(3), rng.raw());
    solve_opts.seed = rng.raw();
    adv_opts.seed = rng.raw();

    SolveReport cap =
        constrained_capacity(phi, ConstraintSet::full_simplex(2), solve_opts);
    Certificate unc = certify_optimal(phi, ConstraintSet::full_simplex(2),
                                      *cap.argmax, 1e-4, adv_opts);
    if (!unc.passed) {
      ok = false;
      os << "unconstrained certificate " << i << " failed (violation "
         << unc.worst_violation << "); ";
    }

    DensityMatrix rho0 = random_state(2, 2, rng.raw());
    SolveReport chi = chi_function(phi, rho0, solve_opts);
    Certificate fix = certify_optimal(phi, ConstraintSet::fixed_state(rho0),
                                      *chi.argmax, 1e-4, adv_opts);
    if (!fix.passed) {
      ok = false;
      os << "fixed-state certificate " << i << " failed (violation "
         << fix.worst_violation << "); ";
    }

    if (i < 5) {
      Ensemble bad({{1.0, random_state(2, 1, rng.raw())}});
      Certificate rej = certify_optimal(phi, ConstraintSet::full_simplex(2),
                                        bad, 1e-4, adv_opts);
      if (!rej.passed && rej.witness.has_value()) ++bad_rejected;
    }
  }
  if (bad_rejected != 5) {
    ok = false;
    os << "suboptimal ensembles rejected " << bad_rejected << "/5; ";
  }
  os << "25 channels, adversary restarts 1000";
  return finish(b, ok, os.str());
}

CriterionResult c5_prop3(int jobs) {
  Budget b{5, "prop3-bound"};
  Rng rng(0x9303);
  SolveOptions opts;
  opts.restarts = 6;
  opts.max_iters = 150;
  opts.jobs = jobs;

  bool ok = true;
  double worst_excess = -kInf;
  for (int i = 0; i < 20; ++i) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    auto psi = random_channel(2, 2, 2, rng.raw());
    Mat e = random_effect(rng, 2);
    const double q = rng.uniform(0.05, 0.95);
    for (std::uint64_t d : {2ull, 4ull, 8ull, 16ull}) {
      opts.seed = rng.raw();
      GapReport rep = prop3_check(phi, psi, e, q, d, std::nullopt, opts);
      worst_excess = std::max(worst_excess, rep.gap - *rep.bound);
      if (!rep.within_bound) ok = false;
    }
  }
  const double secs = seconds_since(b.t0);
  std::ostringstream os;
  os << "worst gap-bound excess = " << worst_excess << " (slack "
     << tol::solver_slack << "), " << secs << " s";
  return finish(b, ok && secs < 300.0, os.str());
}

CriterionResult c6_asymp(int jobs) {
  Budget b{6, "asymp-1-probe"};
  SolveOptions opts;
  opts.restarts = 8;
  opts.seed = 0xA517;
  opts.jobs = jobs;

  std::vector<std::uint64_t> sizes;
  for (std::uint64_t d = 2; d <= 1024; d *= 2) sizes.push_back(d);
  sizes.push_back(1ull << 30);

  auto id2 = identity_channel(2);
  auto reports = asymp_probe(id2, Mat::Identity(2, 2), 1.0, sizes, nullptr,
                             std::nullopt, opts);

  bool ok = true;
  std::ostringstream os;
  for (const auto& rep : reports)
    if (!rep.within_bound) {
      ok = false;
      os << "gap outside bound at d; ";
    }
  const double limit = reports.front().terms.back().second;
  if (std::abs(limit - 2.0) > 1e-6) {
    ok = false;
    os << "penalized limit " << limit << " != 2.0; ";
  }
  const double big_gap = reports.back().gap;
  if (big_gap >= 0.07) {
    ok = false;
    os << "symbolic-d gap " << big_gap << " >= 0.07; ";
  }
  os << "limit = " << limit << ", gap(d=2^30) = " << big_gap;
  return finish(b, ok, os.str());
}

CriterionResult c7_prop4a(int jobs) {
  Budget b{7, "prop4a-subadditivity"};
  Rng rng(0x9404);
  SolveOptions opts;
  opts.restarts = 32;
  opts.jobs = jobs;

  double worst_gap = kInf;
  for (int i = 0; i < 50; ++i) {
    auto phi = random_cq_channel(2, 2 + rng.below(2), rng.raw());
    auto psi = random_channel(2, 2, 2, rng.raw());
    DensityMatrix sigma = random_state(4, 1 + rng.below(4), rng.raw());
    auto joint = tensor_channels(phi, psi);
    opts.seed = rng.raw();

    DensityMatrix m_phi(partial_trace(sigma.matrix(), 2, 2, KeepFactor::first));
    DensityMatrix m_psi(partial_trace(sigma.matrix(), 2, 2, KeepFactor::second));
    const double gap = chi_function(phi, m_phi, opts).value +
                       chi_function(psi, m_psi, opts).value -
                       chi_function(joint, sigma, opts).value;
    worst_gap = std::min(worst_gap, gap);
  }
  std::ostringstream os;
  os << "worst subadditivity gap = " << worst_gap;
  return finish(b, worst_gap >= -2e-3, os.str());
}

CriterionResult c8_scadd(int jobs) {
  Budget b{8, "noiseless-s-c-add"};
  Rng rng(0x5CAD);
  SolveOptions opts;
  opts.restarts = 10;
  opts.jobs = jobs;

  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    auto psi = random_channel(2, 2, 2, rng.raw());
    DensityMatrix rho = random_state(2, 2, rng.raw());
    opts.seed = rng.raw();
    GapReport rep = s_c_add_report(psi, rho, opts);
    worst = std::max(worst, std::abs(rep.gap));
  }
  std::ostringstream os;
  os << "worst |gap| = " << worst;
  return finish(b, worst <= 2e-3, os.str());
}

CriterionResult c9_eof(int jobs) {
  Budget b{9, "eof-oracle-and-cor6"};
  Rng rng(0xE0F);
  SolveOptions opts;
  opts.restarts = 16;
  opts.jobs = jobs;

  bool ok = true;
  std::ostringstream os;
  double worst_dev = 0.0;
  for (int i = 0; i < 50; ++i) {
    DensityMatrix sigma = random_state(4, 1 + rng.below(4), rng.raw());
    opts.seed = rng.raw();
    const double solver = eof(sigma, 2, 2, opts).value;
    const double oracle = wootters_eof(sigma.matrix());
    worst_dev = std::max(worst_dev, std::abs(solver - oracle));
  }
  if (worst_dev >= 1e-4) {
    ok = false;
    os << "eof oracle deviation " << worst_dev << "; ";
  }

  // Cor 6: no certified strong-superadditivity violation.
  SolveOptions upper_opts;
  upper_opts.restarts = 4;
  upper_opts.members = 32;
  upper_opts.max_iters = 200;
  upper_opts.jobs = jobs;
  SolveOptions marg_opts;
  marg_opts.restarts = 12;
  marg_opts.jobs = jobs;
  int violations = 0;
  for (int i = 0; i < 50; ++i) {
    // State on (H1 (x) K1) (x) (H2 (x) K2), all qubits.
    DensityMatrix sigma = random_state(16, 1 + rng.below(4), rng.raw());
    Mat s1 = partial_trace(sigma.matrix(), 4, 4, KeepFactor::first);
    Mat s2 = partial_trace(sigma.matrix(), 4, 4, KeepFactor::second);
    // EoF of the whole across (H1 H2) | (K1 K2): reorder factors to
    // H1, H2, K1, K2.
    Mat reordered =
        permute_factors(sigma.matrix(), {2, 2, 2, 2}, {0, 2, 1, 3});
    upper_opts.seed = rng.raw();
    marg_opts.seed = rng.raw();
    const double upper = eof(DensityMatrix(reordered), 4, 4, upper_opts).value;
    const double sum = eof(DensityMatrix(s1), 2, 2, marg_opts).value +
                       eof(DensityMatrix(s2), 2, 2, marg_opts).value;
    if (upper < sum - 1e-4) ++violations;
  }
  if (violations > 0) {
    ok = false;
    os << violations << " certified cor6 violations; ";
  }
  os << "worst eof deviation = " << worst_dev << ", violations = "
     << violations;
  return finish(b, ok, os.str());
}

CriterionResult c10_prop5(int) {
  Budget b{10, "prop5-curve-suite"};
  Rng rng(0x9505);
  bool ok = true;
  std::ostringstream os;
  int failed = 0;
  for (Eigen::Index dim : {2, 3}) {
    for (int i = 0; i < 30; ++i) {
      auto [sigma, varsigma] = random_curve_pair(dim, rng.raw());
      Prop5Report rep = prop5_suite(sigma, varsigma);
      if (!rep.all_passed) {
        ++failed;
        ok = false;
        for (const auto& c : rep.checks)
          if (!c.passed)
            os << "dim " << dim << " pair " << i << ": " << c.name << " dev "
               << c.value << "; ";
      }
    }
  }
  os << failed << "/60 pairs failed";
  return finish(b, ok, os.str());
}

CriterionResult c11_theorem3(int jobs) {
  Budget b{11, "theorem3-ii-and-tilde-closed-form"};
  Rng rng(0x3113);
  SolveOptions opts;
  opts.restarts = 16;
  opts.jobs = jobs;

  bool ok = true;
  std::ostringstream os;
  double worst_gap = 0.0;
  for (int family = 0; family < 2; ++family) {
    for (int i = 0; i < 10; ++i) {
      auto phi = (family == 0)
                     ? identity_channel(2)
                     : random_cq_channel(2, 2, rng.raw());
      auto psi = random_channel(2, 2, 2, rng.raw());
      Mat a = random_effect(rng, 2);
      Mat bop = random_effect(rng, 2);
      opts.seed = rng.raw();
      GapReport rep = theorem3_ii_gap(phi, psi, a, bop, opts);
      worst_gap = std::max(worst_gap, std::abs(rep.gap));
    }
  }
  if (worst_gap > 2e-3) {
    ok = false;
    os << "worst |gap| " << worst_gap << " > 2e-3; ";
  }

  double worst_closed = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto phi = random_channel(2, 2, 2, rng.raw());
    Mat a = random_effect(rng, 2);
    const std::uint64_t d = 2 + rng.below(1000);
    const double p = rng.uniform(0.0, std::log2(static_cast<double>(d)));
    Mat rho = random_state(2, 2, rng.raw()).matrix();
    auto tilde = shor_tilde_dp(phi, a, p, d);
    worst_closed = std::max(
        worst_closed, std::abs(tilde_entropy_closed_form(*phi, a, p, d, rho) -
                               tilde->apply(rho).entropy()));
  }
  if (worst_closed >= 1e-10) {
    ok = false;
    os << "closed-form deviation " << worst_closed << "; ";
  }
  os << "worst gap = " << worst_gap << ", worst closed-form dev = "
     << worst_closed;
  return finish(b, ok, os.str());
}

CriterionResult c12_known_values(int jobs) {
  Budget b{12, "known-exact-values"};
  SolveOptions opts;
  opts.restarts = 16;
  opts.seed = 0xC12;
  opts.jobs = jobs;

  auto id2 = identity_channel(2);
  Mat proj = Mat::Zero(2, 2);
  proj(0, 0) = 1.0;

  const double cap = constrained_capacity(id2, ConstraintSet::full_simplex(2),
                                          opts)
                         .value;
  const double constrained =
      constrained_capacity(id2, ConstraintSet::linear(2, {{proj, 0.25}}), opts)
          .value;
  const double penalized = penalized_capacity(id2, proj, 1.0, opts).value;

  const bool ok = std::abs(cap - 1.0) <= 1e-6 &&
                  std::abs(constrained - h2(0.25)) <= 1e-4 &&
                  std::abs(penalized - std::log2(3.0)) <= 1e-4;
  std::ostringstream os;
  os << "C(Id) = " << cap << ", constrained = " << constrained
     << " (h2(1/4) = " << h2(0.25) << "), penalized = " << penalized
     << " (log2 3 = " << std::log2(3.0) << ")";
  return finish(b, ok, os.str());
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int jobs, std::ostream* progress) {
  std::vector<CriterionResult> out;
  auto push = [&](CriterionResult r) {
    if (progress) {
      (*progress) << (r.passed ? "[PASS] " : "[FAIL] ") << "C" << r.id << " "
                  << r.name << " (" << r.seconds << " s): " << r.detail
                  << std::endl;
    }
    out.push_back(std::move(r));
  };
  push(c1_donald(jobs));
  push(c2_chi_forms(jobs));
  push(c3_double_inequality(jobs));
  push(c4_certificates(jobs));
  push(c5_prop3(jobs));
  push(c6_asymp(jobs));
  push(c7_prop4a(jobs));
  push(c8_scadd(jobs));
  push(c9_eof(jobs));
  push(c10_prop5(jobs));
  push(c11_theorem3(jobs));
  push(c12_known_values(jobs));
  return out;
}

bool acceptance_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace qclab
