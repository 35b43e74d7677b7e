#include "curves.hpp"

#include <cmath>
#include <functional>

namespace qclab {

namespace {

Mat mix_states(const Mat& sigma, const Mat& varsigma, double x) {
  return x * sigma + (1.0 - x) * varsigma;
}

bool support_contained(const PositiveOperator& inner,
                       const PositiveOperator& outer) {
  const double scale = std::max(1.0, outer.spectrum().maxCoeff());
  double mass = 0.0;
  for (Eigen::Index j = 0; j < outer.spectrum().size(); ++j)
    if (outer.spectrum()(j) < tol::kernel_eig * scale)
      mass += std::real(outer.eigenvectors().col(j).dot(
          inner.matrix() * outer.eigenvectors().col(j)));
  return mass < tol::support_mass;
}

double adaptive_simpson(const std::function<double(double)>& fn, double a,
                        double b, double fa, double fm, double fb, double eps,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(fn, a, m, fa, flm, fm, eps / 2, depth - 1) +
         adaptive_simpson(fn, m, b, fm, frm, fb, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& fn, double a, double b,
                 double eps) {
  if (b <= a) return 0.0;
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  return adaptive_simpson(fn, a, b, fa, fm, fb, eps, 24);
}

}  // namespace

double curve_f(const DensityMatrix& sigma, const DensityMatrix& varsigma,
               double x) {
  return relative_entropy_of(mix_states(sigma.matrix(), varsigma.matrix(), x),
                             varsigma.matrix());
}

double curve_g(const DensityMatrix& sigma, const DensityMatrix& varsigma,
               double x) {
  return relative_entropy_of(varsigma.matrix(),
                             mix_states(sigma.matrix(), varsigma.matrix(), x));
}

std::pair<DensityMatrix, DensityMatrix> random_curve_pair(Eigen::Index dim,
                                                          std::uint64_t seed) {
  Rng rng(seed);
  const Mat mixed = Mat::Identity(dim, dim) / static_cast<double>(dim);
  Mat base = random_state(dim, dim, rng.raw()).matrix();
  Mat varsigma = 0.5 * base + 0.5 * mixed;
  Mat other = random_state(dim, dim, rng.raw()).matrix();
  Mat sigma = 0.65 * varsigma + 0.35 * other;
  return {DensityMatrix(sigma), DensityMatrix(varsigma)};
}

RVec default_curve_grid(bool equal_support) {
  std::vector<double> pts = {0.0, 0.01};
  for (int i = 1; i <= 9; ++i) pts.push_back(0.1 * i);
  pts.push_back(0.99);
  if (equal_support) pts.push_back(1.0);
  RVec grid(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    grid(static_cast<Eigen::Index>(i)) = pts[i];
  return grid;
}

CurvePair sample_curves(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma, const RVec& grid) {
  require(sigma.dim() == varsigma.dim(), ErrorKind::invalid_argument,
          "states live on different spaces");
  require(support_contained(sigma, varsigma), ErrorKind::invalid_argument,
          "support violation: supp sigma must lie inside supp varsigma");

  CurvePair out;
  out.equal_support = support_contained(varsigma, sigma);
  const double t1 = trace_distance(sigma, varsigma);
  out.pinsker_c = 0.5 * t1 * t1;

  out.grid = grid;
  out.f_samples = RVec(grid.size());
  out.g_samples = RVec(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid(i);
    require(x >= 0.0 && (x < 1.0 || (x == 1.0 && out.equal_support) ||
                         x == 1.0),
            ErrorKind::invalid_argument, "grid point outside [0,1]");
    out.f_samples(i) = curve_f(sigma, varsigma, x);
    out.g_samples(i) = curve_g(sigma, varsigma, x);
  }

  // Convexity via second divided differences on the sampled grid.
  for (Eigen::Index i = 2; i < grid.size(); ++i) {
    const double x0 = grid(i - 2), x1 = grid(i - 1), x2 = grid(i);
    if (!std::isfinite(out.f_samples(i)) || !std::isfinite(out.g_samples(i)))
      continue;
    auto second = [&](const RVec& v) {
      const double d01 = (v(i - 1) - v(i - 2)) / (x1 - x0);
      const double d12 = (v(i) - v(i - 1)) / (x2 - x1);
      return (d12 - d01) / (x2 - x0);
    };
    if (second(out.f_samples) < -1e-9 || second(out.g_samples) < -1e-9)
      out.convex_ok = false;
  }
  return out;
}

CurvePair sample_curves(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma) {
  const bool eq = support_contained(sigma, varsigma) &&
                  support_contained(varsigma, sigma);
  return sample_curves(sigma, varsigma, default_curve_grid(eq));
}

Prop5Report prop5_suite(const DensityMatrix& sigma,
                        const DensityMatrix& varsigma) {
  Prop5Report report;
  CurvePair base = sample_curves(sigma, varsigma,
                                 default_curve_grid(false));
  report.equal_support = base.equal_support;

  auto f = [&](double x) { return curve_f(sigma, varsigma, x); };
  auto g = [&](double x) { return curve_g(sigma, varsigma, x); };

  // (a) transform identity with central differences.
  {
    CheckResult c{"transform g = x f' - f", 0.0, 1e-5, true, ""};
    const double h = 1e-4;
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double fp = (f(x + h) - f(x - h)) / (2 * h);
      c.value = std::max(c.value, std::abs(g(x) - (x * fp - f(x))));
    }
    c.passed = c.value <= c.tolerance;
    report.checks.push_back(c);
  }

  // (b) inverse transform by quadrature.
  {
    CheckResult c{"quadrature f = x int g/t^2", 0.0, 1e-4, true, ""};
    auto integrand = [&](double t) { return g(t) / (t * t); };
    const double t0 = 1e-4;
    const double q1 = integrand(t0), q2 = integrand(2 * t0);
    const double head = t0 * (1.5 * q1 - 0.5 * q2);  // linear extrapolation
    for (double x : {0.3, 0.6, 0.9}) {
      const double integral = head + integrate(integrand, t0, x, 1e-7);
      c.value = std::max(c.value, std::abs(f(x) - x * integral));
    }
    c.passed = c.value <= c.tolerance;
    report.checks.push_back(c);
  }

  // (c) f'(0) = 0 (Richardson one-sided; f(0) = 0).
  {
    CheckResult c{"f'(0) = 0", 0.0, 1e-4, true, ""};
    const double h = 1e-3;
    c.value = std::abs((4 * f(h) - f(2 * h)) / (2 * h));
    c.passed = c.value <= c.tolerance;
    report.checks.push_back(c);
  }

  // (d) f'(1) = S(sigma||varsigma) + S(varsigma||sigma) for equal supports.
  {
    CheckResult c{"f'(1) = S(s||v) + S(v||s)", 0.0, 1e-4, true, ""};
    if (report.equal_support) {
      const double h = 1e-3;
      const double fp1 =
          (3 * f(1.0) - 4 * f(1.0 - h) + f(1.0 - 2 * h)) / (2 * h);
      const double target =
          relative_entropy(sigma, varsigma) + relative_entropy(varsigma, sigma);
      c.value = std::abs(fp1 - target);
      c.passed = c.value <= c.tolerance;
    } else {
      c.note = "skipped: supports differ";
    }
    report.checks.push_back(c);
  }

  // (e) Pinsker floors in natural-log units, exact sign.
  {
    CheckResult c{"pinsker floors", 0.0, 1e-12, true, ""};
    const double ln2 = std::log(2.0);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < base.grid.size(); ++i) {
      const double x = base.grid(i);
      worst = std::min(worst,
                       base.f_samples(i) * ln2 - base.pinsker_c * x * x);
      worst = std::min(worst,
                       base.g_samples(i) * ln2 - base.pinsker_c * x * x);
    }
    c.value = -worst;  // positive value means a floor violation
    c.passed = c.value <= c.tolerance;
    report.checks.push_back(c);
  }

  // (f) d^n g(0) = (n-1) d^n f(0) for n = 2, 3.
  {
    CheckResult c{"derivative relations n=2,3", 0.0, 0.0, true, ""};
    const double h = 0.01;
    auto second0 = [&](auto&& fn) {
      return (2 * fn(0.0) - 5 * fn(h) + 4 * fn(2 * h) - fn(3 * h)) / (h * h);
    };
    auto third0 = [&](auto&& fn) {
      return (-2.5 * fn(0.0) + 9 * fn(h) - 12 * fn(2 * h) + 7 * fn(3 * h) -
              1.5 * fn(4 * h)) /
             (h * h * h);
    };
    const double f2 = second0(f), g2 = second0(g);
    const double f3 = third0(f), g3 = third0(g);
    const double dev2 = std::abs(g2 - f2);
    const double dev3 = std::abs(g3 - 2 * f3);
    const double tol2 = std::max(0.02 * std::abs(f2), 5e-3);
    const double tol3 = std::max(0.05 * std::abs(2 * f3), 5e-2);
    c.value = std::max(dev2 - tol2, dev3 - tol3);  // margin form
    c.tolerance = 0.0;
    c.passed = c.value <= 0.0;
    report.checks.push_back(c);
  }

  for (const auto& c : report.checks) report.all_passed &= c.passed;
  return report;
}

MixtureCurveReport mixture_curve(const ChannelPtr& phi, const ChannelPtr& psi,
                                 const Ensemble& phi_ensemble,
                                 const Ensemble& psi_ensemble,
                                 const Ensemble& probe, const RVec& grid,
                                 bool probe_is_optimal) {
  const Eigen::Index dh = phi->input_dim();
  const Eigen::Index dk = psi->input_dim();
  require(probe.dim() == dh * dk, ErrorKind::invalid_argument,
          "probe does not live on the joint input space");

  const Mat rho = average_state(phi_ensemble).matrix();
  const Mat varrho = average_state(psi_ensemble).matrix();
  const Mat sigma_av = average_state(probe).matrix();
  require((partial_trace(sigma_av, dh, dk, KeepFactor::first) - rho)
                  .cwiseAbs()
                  .maxCoeff() < 1e-8 &&
              (partial_trace(sigma_av, dh, dk, KeepFactor::second) - varrho)
                      .cwiseAbs()
                      .maxCoeff() < 1e-8,
          ErrorKind::invalid_argument,
          "probe average must have the ensembles' averages as marginals");

  auto joint = tensor_channels(phi, psi);

  // Product ensemble {pi_i w_j, rho_i (x) rho_j}.
  std::vector<Ensemble::Item> prod_items;
  for (const auto& a : phi_ensemble.items())
    for (const auto& b : psi_ensemble.items())
      prod_items.push_back(
          {a.p * b.p,
           DensityMatrix(kron(a.state.matrix(), b.state.matrix()))});
  Ensemble product(prod_items);

  // delta = sum pi H(Phi rho_i) + sum w H(Psi rho_j) - sum mu H(joint sigma_k).
  double delta = 0.0;
  for (const auto& it : phi_ensemble.items())
    delta += it.p * phi->apply(it.state.matrix()).entropy();
  for (const auto& it : psi_ensemble.items())
    delta += it.p * psi->apply(it.state.matrix()).entropy();
  for (const auto& it : probe.items())
    delta -= it.p * joint->apply(it.state.matrix()).entropy();

  DensityMatrix out_joint(joint->apply(sigma_av).as_quantum());
  DensityMatrix out_prod(
      kron(phi->apply(rho).as_quantum(), psi->apply(varrho).as_quantum()));

  const double chi0 = holevo_quantity(*joint, product);

  MixtureCurveReport rep;
  rep.grid = grid;
  rep.h_samples = RVec(grid.size());
  rep.f_samples = RVec(grid.size());
  rep.delta = delta;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid(i);
    std::vector<Ensemble::Item> mixed;
    for (const auto& it : probe.items()) mixed.push_back({x * it.p, it.state});
    for (const auto& it : product.items())
      mixed.push_back({(1 - x) * it.p, it.state});
    // Weight-zero members are legal in the mixture except at the endpoints.
    double chix;
    if (x == 0.0)
      chix = chi0;
    else if (x == 1.0)
      chix = holevo_quantity(*joint, probe);
    else
      chix = holevo_quantity(*joint, Ensemble(mixed));
    rep.h_samples(i) = chix - chi0;
    rep.f_samples(i) = curve_f(out_joint, out_prod, x);
    rep.max_identity_dev = std::max(
        rep.max_identity_dev,
        std::abs(rep.h_samples(i) - (x * delta - rep.f_samples(i))));
  }
  rep.identity_ok = rep.max_identity_dev < 1e-8;

  if (probe_is_optimal) {
    const double h = 1e-3;
    auto fmix = [&](double x) { return curve_f(out_joint, out_prod, x); };
    rep.fprime_at_1 =
        (3 * fmix(1.0) - 4 * fmix(1.0 - h) + fmix(1.0 - 2 * h)) / (2 * h);
    rep.fprime_le_delta = *rep.fprime_at_1 <= delta + tol::solver_slack;
  }
  return rep;
}

}  // namespace qclab
