#include "solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace qclab {

namespace {

constexpr double kLogFloor = 1e-18;

double floored_log2(double x) { return std::log2(std::max(x, kLogFloor)); }

// Best restart wins; ties go to the lowest restart index (iteration order).
struct RestartOutcome {
  double value = kInf;  // engines minimize
  bool converged = false;
};

double top_quartile_spread(std::vector<double> values) {
  if (values.size() < 2) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t q = std::max<std::size_t>(2, values.size() / 4);
  return values[q - 1] - values[0];
}

void parallel_restarts(int restarts, int jobs,
                       const std::function<void(int)>& body) {
  if (jobs <= 1 || restarts <= 1) {
    for (int r = 0; r < restarts; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= restarts) return;
      body(r);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min(jobs, restarts);
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Engine A: optimization over fixed-average decompositions (Stiefel manifold)
// ---------------------------------------------------------------------------

struct StiefelProblem {
  ChannelPtr phi;
  Mat big_r;    // dim x r, columns sqrt(lambda_k) v_k
  Mat linear;   // empty -> zero
  Eigen::Index n = 0, r = 0;
};

struct StiefelEval {
  double value = 0.0;
  Mat grad;  // n x r Wirtinger gradient wrt conj(U)
};

double stiefel_value(const StiefelProblem& p, const Mat& u) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.n; ++i) {
    CVec psi = p.big_r * u.row(i).transpose();
    const double t = psi.squaredNorm();
    if (t < 1e-16) continue;
    Mat member = psi * psi.adjoint();
    total += p.phi->apply(member).entropy() + t * floored_log2(t);
    if (p.linear.size() > 0) total += (p.linear * member).trace().real();
  }
  return total;
}

StiefelEval stiefel_eval(const StiefelProblem& p, const Mat& u) {
  StiefelEval out;
  out.grad = Mat::Zero(p.n, p.r);
  const double inv_ln2 = 1.0 / std::log(2.0);
  for (Eigen::Index i = 0; i < p.n; ++i) {
    CVec psi = p.big_r * u.row(i).transpose();
    const double t = psi.squaredNorm();
    if (t < 1e-16) continue;
    Mat member = psi * psi.adjoint();
    auto [h, gh] = p.phi->output_entropy_grad(member);
    out.value += h + t * floored_log2(t);
    Mat d = gh + (floored_log2(t) + inv_ln2) *
                     Mat::Identity(p.big_r.rows(), p.big_r.rows());
    if (p.linear.size() > 0) {
      out.value += (p.linear * member).trace().real();
      d += p.linear;
    }
    out.grad.row(i) =
        (p.big_r.adjoint() * d * psi).transpose();
  }
  return out;
}

Mat stiefel_project(const Mat& u, const Mat& g) {
  Mat m = u.adjoint() * g;
  return g - u * (0.5 * (m + m.adjoint()));
}

Mat stiefel_retract(const Mat& a) {
  // Polar factor a (a^dag a)^{-1/2}.
  Mat gram = a.adjoint() * a;
  auto es = eig_hermitian(gram);
  Mat inv_sqrt = Mat::Zero(gram.rows(), gram.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lam = std::max(es.values(i), 1e-30);
    inv_sqrt += (1.0 / std::sqrt(lam)) *
                (es.vectors.col(i) * es.vectors.col(i).adjoint());
  }
  return a * inv_sqrt;
}

struct StiefelRun {
  double value = kInf;
  Mat u;
  bool converged = false;
};

StiefelRun stiefel_descend(const StiefelProblem& p, Mat u,
                           const SolveOptions& opts) {
  StiefelRun run;
  double step = 0.1;
  StiefelEval ev = stiefel_eval(p, u);
  double best = ev.value;
  int stall = 0;
  bool converged = false;
  for (int it = 0; it < opts.max_iters; ++it) {
    Mat xi = stiefel_project(u, ev.grad);
    const double slope = xi.squaredNorm();
    if (slope < 1e-22) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Mat cand = stiefel_retract(u - step * xi);
      const double val = stiefel_value(p, cand);
      if (val <= ev.value - 1e-4 * step * slope) {
        u = std::move(cand);
        ev = stiefel_eval(p, u);
        step = std::min(step * 1.4, 10.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    if (best - ev.value < opts.rel_tol * std::max(1.0, std::abs(best))) {
      if (++stall >= opts.patience) {
        converged = true;
        break;
      }
    } else {
      stall = 0;
    }
    best = std::min(best, ev.value);
  }
  run.value = ev.value;
  run.u = std::move(u);
  run.converged = converged;
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConstraintSet
// ---------------------------------------------------------------------------

ConstraintSet ConstraintSet::full_simplex(Eigen::Index dim) {
  return ConstraintSet(Kind::full_simplex, dim);
}

ConstraintSet ConstraintSet::fixed_state(DensityMatrix rho) {
  ConstraintSet set(Kind::fixed_state, rho.dim());
  set.state_ = std::move(rho);
  return set;
}

ConstraintSet ConstraintSet::linear(Eigen::Index dim,
                                    std::vector<LinearTerm> terms) {
  ConstraintSet set(Kind::linear, dim);
  for (auto& t : terms) {
    require(t.a.rows() == dim && t.a.cols() == dim, ErrorKind::validation,
            "constraint operator has wrong dimension");
    PositiveOperator p(t.a);
    require(p.spectrum().maxCoeff() <= 1.0 + 1e-10, ErrorKind::validation,
            "constraint operator must satisfy 0 <= A <= I");
    require(t.alpha >= 0.0 && t.alpha <= 1.0, ErrorKind::validation,
            "constraint level must lie in [0,1]");
  }
  set.terms_ = std::move(terms);
  // Nonemptiness: a maximally mixed probe or a short feasibility solve
  // (tolerating 1e-6, so boundary-only sets validate).
  if (!set.contains(Mat::Identity(dim, dim) / static_cast<double>(dim))) {
    SolveOptions fopts;
    fopts.restarts = 4;
    fopts.max_iters = 200;
    require(find_strictly_feasible(dim, set.terms_, -1e-6, fopts).has_value(),
            ErrorKind::validation, "linear constraint set is empty");
  }
  return set;
}

const DensityMatrix& ConstraintSet::state() const {
  require(state_.has_value(), ErrorKind::invalid_argument,
          "constraint set has no fixed state");
  return *state_;
}

double ConstraintSet::worst_violation(const Mat& rho) const {
  switch (kind_) {
    case Kind::full_simplex:
      return 0.0;
    case Kind::fixed_state:
      return (rho - state_->matrix()).cwiseAbs().maxCoeff();
    case Kind::linear: {
      double worst = 0.0;
      for (const auto& t : terms_)
        worst = std::max(worst, (t.a * rho).trace().real() - t.alpha);
      return worst;
    }
  }
  return 0.0;
}

bool ConstraintSet::contains(const Mat& rho, double tol) const {
  return worst_violation(rho) <= tol;
}

// ---------------------------------------------------------------------------
// Engine B: free pure-state ensembles with average-state constraints
// ---------------------------------------------------------------------------

namespace {

struct PenaltyState {
  double weight = 0.0;
  std::vector<double> ineq_mult;  // one per inequality
  Mat marg1_mult, marg2_mult;     // multipliers for marginal equalities
};

struct FreeParams {
  Mat psi;   // dim x n, unit columns
  RVec w;    // softmax weights
};

struct FreeEval {
  double objective = 0.0;       // value being maximized (without penalties)
  double merit = 0.0;           // objective minus penalty terms
  Mat psi_grad;                 // dim x n (ascent direction, pre-projection)
  RVec w_grad;
  Mat rho_av;
};

RVec softmax(const RVec& w) {
  RVec p = (w.array() - w.maxCoeff()).exp();
  return p / p.sum();
}

FreeEval free_eval(const EnsembleProblem& prob, const PenaltyState& pen,
                   const FreeParams& params, bool want_grad) {
  const Eigen::Index dim = prob.dim;
  const Eigen::Index n = params.psi.cols();
  FreeEval ev;
  RVec pi = softmax(params.w);

  Mat rho_av = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    rho_av.noalias() += pi(i) * (params.psi.col(i) * params.psi.col(i).adjoint());
  ev.rho_av = rho_av;

  // Common matrix: everything that reaches members through rho_av.
  Mat common = Mat::Zero(dim, dim);
  std::vector<Mat> member_extra;  // b-part gradients per member
  RVec s = RVec::Zero(n);         // dJ/dpi_i contributions

  double value = 0.0;
  for (const auto& term : prob.terms) {
    if (term.a != 0.0) {
      if (want_grad) {
        auto [h, g] = term.channel->output_entropy_grad(rho_av);
        value += term.a * h;
        common += term.a * g;
      } else {
        value += term.a * term.channel->apply(rho_av).entropy();
      }
    }
    if (term.b != 0.0) {
      for (Eigen::Index i = 0; i < n; ++i) {
        Mat member = params.psi.col(i) * params.psi.col(i).adjoint();
        if (want_grad) {
          auto [h, g] = term.channel->output_entropy_grad(member);
          value += term.b * pi(i) * h;
          s(i) += term.b * h;
          if (member_extra.empty()) member_extra.assign(n, Mat::Zero(dim, dim));
          member_extra[i] += term.b * pi(i) * g;
        } else {
          value += term.b * pi(i) * term.channel->apply(member).entropy();
        }
      }
    }
  }
  if (prob.linear.size() > 0) {
    value += (prob.linear * rho_av).trace().real();
    if (want_grad) common += prob.linear;
  }
  ev.objective = value;

  // Augmented-Lagrangian penalty terms (subtracted from the merit).
  double penalty = 0.0;
  if (pen.weight > 0.0) {
    for (std::size_t k = 0; k < prob.ineq.size(); ++k) {
      const double v = (prob.ineq[k].a * rho_av).trace().real() -
                       prob.ineq[k].alpha;
      const double shifted = v + pen.ineq_mult[k] / (2.0 * pen.weight);
      if (shifted > 0.0) {
        penalty += pen.weight * shifted * shifted -
                   pen.ineq_mult[k] * pen.ineq_mult[k] / (4.0 * pen.weight);
        if (want_grad) common -= 2.0 * pen.weight * shifted * prob.ineq[k].a;
      } else {
        penalty += -pen.ineq_mult[k] * pen.ineq_mult[k] / (4.0 * pen.weight);
      }
    }
    auto marginal_penalty = [&](const Mat& target, bool first, const Mat& mult) {
      Mat delta = first ? partial_trace(rho_av, prob.dim_h, prob.dim_k,
                                        KeepFactor::first) -
                              target
                        : partial_trace(rho_av, prob.dim_h, prob.dim_k,
                                        KeepFactor::second) -
                              target;
      penalty += (mult * delta).trace().real() +
                 pen.weight * delta.squaredNorm();
      if (want_grad) {
        Mat g = mult + 2.0 * pen.weight * delta;
        common -= first ? kron(g, Mat::Identity(prob.dim_k, prob.dim_k))
                        : kron(Mat::Identity(prob.dim_h, prob.dim_h), g);
      }
    };
    if (prob.fix_marginal_first)
      marginal_penalty(*prob.fix_marginal_first, true, pen.marg1_mult);
    if (prob.fix_marginal_second)
      marginal_penalty(*prob.fix_marginal_second, false, pen.marg2_mult);
  }
  ev.merit = value - penalty;

  if (want_grad) {
    ev.psi_grad = Mat::Zero(dim, n);
    ev.w_grad = RVec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Mat delta = pi(i) * common;
      if (!member_extra.empty()) delta += member_extra[i];
      CVec g = delta * params.psi.col(i);
      // Project out the radial component (states stay normalized).
      const Cplx radial = params.psi.col(i).dot(g);
      ev.psi_grad.col(i) = g - radial * params.psi.col(i);
      s(i) += std::real(params.psi.col(i).dot(common * params.psi.col(i)));
    }
    const double avg = pi.dot(s);
    for (Eigen::Index i = 0; i < n; ++i) ev.w_grad(i) = pi(i) * (s(i) - avg);
  }
  return ev;
}

struct FreeRun {
  double merit = -kInf;
  FreeParams params;
  bool converged = false;
};

FreeRun free_ascend(const EnsembleProblem& prob, const PenaltyState& pen,
                    FreeParams params, const SolveOptions& opts) {
  FreeRun run;
  double step = 0.2;
  FreeEval ev = free_eval(prob, pen, params, true);
  double best = ev.merit;
  int stall = 0;
  bool converged = false;
  for (int it = 0; it < opts.max_iters; ++it) {
    const double slope =
        ev.psi_grad.squaredNorm() + ev.w_grad.squaredNorm();
    if (slope < 1e-22) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      FreeParams cand;
      cand.psi = params.psi + step * ev.psi_grad;
      for (Eigen::Index i = 0; i < cand.psi.cols(); ++i)
        cand.psi.col(i).normalize();
      cand.w = params.w + step * ev.w_grad;
      FreeEval cev = free_eval(prob, pen, cand, false);
      if (cev.merit >= ev.merit + 1e-4 * step * slope) {
        params = std::move(cand);
        ev = free_eval(prob, pen, params, true);
        step = std::min(step * 1.4, 5.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    if (ev.merit - best < opts.rel_tol * std::max(1.0, std::abs(best))) {
      if (++stall >= opts.patience) {
        converged = true;
        break;
      }
    } else {
      stall = 0;
    }
    best = std::max(best, ev.merit);
  }
  run.merit = ev.merit;
  run.params = std::move(params);
  run.converged = converged;
  return run;
}

Ensemble extract_ensemble(const FreeParams& params) {
  RVec pi = softmax(params.w);
  std::vector<Ensemble::Item> items;
  double kept = 0.0;
  for (Eigen::Index i = 0; i < params.psi.cols(); ++i) {
    if (pi(i) < 1e-12) continue;
    kept += pi(i);
    items.push_back({pi(i), DensityMatrix(Mat(params.psi.col(i) *
                                              params.psi.col(i).adjoint()))});
  }
  for (auto& it : items) it.p /= kept;
  return Ensemble(std::move(items));
}

double exact_objective(const EnsembleProblem& prob, const Ensemble& e) {
  double value = 0.0;
  const Mat rho_av = average_state(e).matrix();
  for (const auto& term : prob.terms) {
    if (term.a != 0.0) value += term.a * term.channel->apply(rho_av).entropy();
    if (term.b != 0.0)
      for (const auto& it : e.items())
        value +=
            term.b * it.p * term.channel->apply(it.state.matrix()).entropy();
  }
  if (prob.linear.size() > 0) value += (prob.linear * rho_av).trace().real();
  return value;
}

bool has_constraints(const EnsembleProblem& prob) {
  return !prob.ineq.empty() || prob.fix_marginal_first.has_value() ||
         prob.fix_marginal_second.has_value();
}

}  // namespace

SolveReport maximize_free_ensemble(const EnsembleProblem& prob,
                                   const SolveOptions& opts) {
  require(prob.dim > 0, ErrorKind::invalid_argument, "problem dim missing");
  if (prob.fix_marginal_first || prob.fix_marginal_second)
    require(prob.dim_h * prob.dim_k == prob.dim, ErrorKind::invalid_argument,
            "marginal constraints need a dim_h x dim_k factorization");

  const Eigen::Index n =
      (opts.members > 0) ? opts.members : prob.dim * prob.dim;
  const bool constrained = has_constraints(prob);

  struct Candidate {
    double merit = -kInf;
    double residual = kInf;
    FreeParams params;
    bool converged = false;
  };
  std::vector<Candidate> results(std::max(1, opts.restarts));

  Rng root(opts.seed);
  std::vector<std::uint64_t> seeds(results.size());
  for (auto& s : seeds) s = root.raw();

  parallel_restarts(static_cast<int>(results.size()), opts.jobs, [&](int r) {
    Rng rng(seeds[static_cast<std::size_t>(r)]);
    FreeParams params;
    params.psi = Mat(prob.dim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      CVec v(prob.dim);
      for (Eigen::Index j = 0; j < prob.dim; ++j) v(j) = rng.cnormal();
      params.psi.col(i) = v.normalized();
    }
    params.w = RVec::Zero(n);

    PenaltyState pen;
    Candidate cand;
    if (!constrained) {
      FreeRun run = free_ascend(prob, pen, std::move(params), opts);
      cand.merit = run.merit;
      cand.params = std::move(run.params);
      cand.converged = run.converged;
      cand.residual = 0.0;
    } else {
      pen.weight = opts.penalty_init;
      pen.ineq_mult.assign(prob.ineq.size(), 0.0);
      if (prob.fix_marginal_first)
        pen.marg1_mult = Mat::Zero(prob.dim_h, prob.dim_h);
      if (prob.fix_marginal_second)
        pen.marg2_mult = Mat::Zero(prob.dim_k, prob.dim_k);
      FreeRun run;
      for (int round = 0; round < opts.penalty_rounds; ++round) {
        run = free_ascend(prob, pen, std::move(params), opts);
        params = run.params;
        // Multiplier updates and residual bookkeeping.
        FreeEval ev = free_eval(prob, pen, params, false);
        double residual = 0.0;
        for (std::size_t k = 0; k < prob.ineq.size(); ++k) {
          const double v = (prob.ineq[k].a * ev.rho_av).trace().real() -
                           prob.ineq[k].alpha;
          pen.ineq_mult[k] =
              std::max(0.0, pen.ineq_mult[k] + 2.0 * pen.weight * v);
          residual = std::max(residual, v);
        }
        if (prob.fix_marginal_first) {
          Mat delta = partial_trace(ev.rho_av, prob.dim_h, prob.dim_k,
                                    KeepFactor::first) -
                      *prob.fix_marginal_first;
          pen.marg1_mult += 2.0 * pen.weight * delta;
          residual = std::max(residual, delta.cwiseAbs().maxCoeff());
        }
        if (prob.fix_marginal_second) {
          Mat delta = partial_trace(ev.rho_av, prob.dim_h, prob.dim_k,
                                    KeepFactor::second) -
                      *prob.fix_marginal_second;
          pen.marg2_mult += 2.0 * pen.weight * delta;
          residual = std::max(residual, delta.cwiseAbs().maxCoeff());
        }
        cand.residual = residual;
        if (residual < 1e-8 && round >= 1) break;
        pen.weight *= 10.0;
      }
      cand.merit = run.merit;
      cand.params = std::move(run.params);
      cand.converged = run.converged;
    }
    results[static_cast<std::size_t>(r)] = std::move(cand);
  });

  // Deterministic reduction: strict improvement, lowest index wins ties.
  const Candidate* best = &results.front();
  for (const auto& c : results)
    if (c.merit > best->merit) best = &c;

  SolveReport report;
  report.restarts_used = static_cast<int>(results.size());
  report.converged = best->converged;
  report.constraint_residual = best->residual == kInf ? 0.0 : best->residual;
  std::vector<double> values;
  for (const auto& c : results) values.push_back(-c.merit);
  report.gap_estimate = top_quartile_spread(std::move(values));

  Ensemble e = extract_ensemble(best->params);
  report.value = exact_objective(prob, e);
  report.argmax = std::move(e);
  return report;
}

SolveReport minimize_decomposition(const ChannelPtr& phi,
                                   const DensityMatrix& rho, const Mat& linear,
                                   const SolveOptions& opts) {
  StiefelProblem prob;
  prob.phi = phi;
  prob.linear = linear;
  prob.r = psd_rank(rho);
  prob.n = (opts.members > 0) ? opts.members : rho.dim() * rho.dim();
  require(prob.n >= prob.r, ErrorKind::invalid_argument,
          "decomposition length below rank");

  prob.big_r = Mat(rho.dim(), prob.r);
  const double scale = std::max(1.0, rho.spectrum().maxCoeff());
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < rho.spectrum().size(); ++i)
    if (rho.spectrum()(i) > tol::kernel_eig * scale)
      prob.big_r.col(c++) =
          std::sqrt(rho.spectrum()(i)) * rho.eigenvectors().col(i);

  struct Candidate {
    double value = kInf;
    Mat u;
    bool converged = false;
  };
  std::vector<Candidate> results(std::max(1, opts.restarts));
  Rng root(opts.seed);
  std::vector<std::uint64_t> seeds(results.size());
  for (auto& s : seeds) s = root.raw();

  parallel_restarts(static_cast<int>(results.size()), opts.jobs, [&](int r) {
    Rng rng(seeds[static_cast<std::size_t>(r)]);
    Mat u0;
    if (r == 0) {
      // Eigen-ensemble start.
      u0 = Mat::Zero(prob.n, prob.r);
      u0.topRows(prob.r) = Mat::Identity(prob.r, prob.r);
    } else {
      u0 = haar_isometry(rng, prob.n, prob.r);
    }
    StiefelRun run = stiefel_descend(prob, std::move(u0), opts);
    results[static_cast<std::size_t>(r)] = {run.value, std::move(run.u),
                                            run.converged};
  });

  const Candidate* best = &results.front();
  for (const auto& c : results)
    if (c.value < best->value) best = &c;

  SolveReport report;
  report.restarts_used = static_cast<int>(results.size());
  report.converged = best->converged;
  std::vector<double> values;
  for (const auto& c : results) values.push_back(c.value);
  report.gap_estimate = top_quartile_spread(std::move(values));

  Ensemble e = hjw_ensemble(rho, prob.n, best->u);
  // Recompute the achieved value from the extracted ensemble.
  double value = 0.0;
  for (const auto& it : e.items()) {
    value += it.p * phi->apply(it.state.matrix()).entropy();
    if (linear.size() > 0)
      value += it.p * (linear * it.state.matrix()).trace().real();
  }
  report.value = value;
  report.argmax = std::move(e);
  return report;
}

SolveReport minimize_pure_state(const ChannelPtr& phi, const Mat& linear,
                                const SolveOptions& opts) {
  EnsembleProblem prob;
  prob.dim = phi->input_dim();
  prob.terms.push_back({0.0, -1.0, phi});
  if (linear.size() > 0) prob.linear = -linear;

  SolveOptions single = opts;
  single.members = 1;
  SolveReport rep = maximize_free_ensemble(prob, single);
  rep.value = -rep.value;
  if (rep.argmax) rep.arg_state = average_state(*rep.argmax);
  return rep;
}

// ---------------------------------------------------------------------------
// Named solvers
// ---------------------------------------------------------------------------

SolveReport chi_function(const ChannelPtr& phi, const DensityMatrix& rho,
                         const SolveOptions& opts) {
  require(rho.dim() == phi->input_dim(), ErrorKind::invalid_argument,
          "state does not live on the channel input space");
  const double h_out = phi->apply(rho.matrix()).entropy();

  if (psd_rank(rho) == 1) {
    SolveReport rep;
    rep.value = 0.0;
    rep.convex_closure = h_out;
    rep.converged = true;
    rep.argmax = Ensemble({{1.0, rho}});
    return rep;
  }

  SolveReport inner = minimize_decomposition(phi, rho, Mat(), opts);
  SolveReport rep;
  rep.value = h_out - inner.value;
  rep.convex_closure = inner.value;
  rep.converged = inner.converged;
  rep.restarts_used = inner.restarts_used;
  rep.gap_estimate = inner.gap_estimate;
  rep.argmax = std::move(inner.argmax);
  return rep;
}

SolveReport constrained_capacity(const ChannelPtr& phi, const ConstraintSet& set,
                                 const SolveOptions& opts) {
  require(set.dim() == phi->input_dim(), ErrorKind::invalid_argument,
          "constraint set lives on the wrong space");
  if (set.kind() == ConstraintSet::Kind::fixed_state)
    return chi_function(phi, set.state(), opts);

  EnsembleProblem prob;
  prob.dim = phi->input_dim();
  prob.terms.push_back({1.0, -1.0, phi});
  if (set.kind() == ConstraintSet::Kind::linear) prob.ineq = set.terms();

  SolveReport rep = maximize_free_ensemble(prob, opts);

  if (set.kind() == ConstraintSet::Kind::linear && rep.argmax) {
    // Achieved-value contract: repair any residual infeasibility by mixing
    // toward a strictly feasible anchor, then report the honest chi value.
    Ensemble e = *rep.argmax;
    Mat av = average_state(e).matrix();
    std::optional<DensityMatrix> anchor;
    if (!set.contains(av, 1e-9))
      anchor = find_strictly_feasible(prob.dim, set.terms(), 1e-6, opts);
    if (anchor.has_value()) {
      double s_needed = 0.0;
      for (const auto& t : set.terms()) {
        const double v = (t.a * av).trace().real() - t.alpha;
        if (v <= 0) continue;
        const double va =
            (t.a * anchor->matrix()).trace().real() - t.alpha;
        require(va < 0, ErrorKind::numerical, "anchor is not strictly feasible");
        s_needed = std::max(s_needed, v / (v - va));
      }
      const double s = std::min(1.0, s_needed * (1.0 + 1e-6));
      std::vector<Ensemble::Item> items;
      for (const auto& it : e.items()) items.push_back({(1 - s) * it.p, it.state});
      Ensemble anchor_e = hjw_ensemble(
          *anchor, anchor->dim(),
          Mat(Mat::Identity(anchor->dim(), psd_rank(*anchor))));
      for (const auto& it : anchor_e.items())
        items.push_back({s * it.p, it.state});
      e = Ensemble(std::move(items));
      rep.argmax = e;
      rep.constraint_residual = set.worst_violation(average_state(e).matrix());
    }
    rep.value = holevo_quantity(*phi, *rep.argmax);
  }
  return rep;
}

SolveReport min_output_entropy(const ChannelPtr& phi, const SolveOptions& opts) {
  return minimize_pure_state(phi, Mat(), opts);
}

SolveReport nu_h(const ChannelPtr& phi, const Mat& a, const SolveOptions& opts) {
  PositiveOperator pa(a);  // A >= 0
  return minimize_pure_state(phi, pa.matrix(), opts);
}

SolveReport conjugate_h(const ChannelPtr& phi, const Mat& x,
                        const SolveOptions& opts) {
  HermitianOperator hx(x);
  SolveReport rep = minimize_pure_state(phi, Mat(-hx.matrix()), opts);
  rep.value = -rep.value;
  return rep;
}

SolveReport penalized_capacity(const ChannelPtr& phi, const Mat& a, double p,
                               const SolveOptions& opts) {
  require(p >= 0.0, ErrorKind::invalid_argument, "penalty weight must be >= 0");
  PositiveOperator pa(a);
  require(pa.spectrum().maxCoeff() <= 1.0 + 1e-10, ErrorKind::invalid_argument,
          "operator must satisfy 0 <= A <= I");
  EnsembleProblem prob;
  prob.dim = phi->input_dim();
  prob.terms.push_back({1.0, -1.0, phi});
  prob.linear = p * pa.matrix();
  return maximize_free_ensemble(prob, opts);
}

std::optional<DensityMatrix> find_strictly_feasible(
    Eigen::Index dim, const std::vector<LinearTerm>& terms, double margin,
    const SolveOptions& opts) {
  // Minimize sum_k max(0, Tr A_k rho - alpha_k + margin)^2 over states.
  EnsembleProblem prob;
  prob.dim = dim;
  prob.ineq = terms;
  for (auto& t : prob.ineq) t.alpha -= margin;

  SolveOptions fopts = opts;
  fopts.members = dim;
  fopts.penalty_rounds = std::max(4, opts.penalty_rounds);
  fopts.penalty_init = 1e3;
  SolveReport rep = maximize_free_ensemble(prob, fopts);
  if (!rep.argmax) return std::nullopt;
  DensityMatrix rho = average_state(*rep.argmax);
  for (const auto& t : terms)
    if ((t.a * rho.matrix()).trace().real() - t.alpha > -margin)
      return std::nullopt;
  return rho;
}

Certificate certify_optimal(const ChannelPtr& phi, const ConstraintSet& set,
                            const Ensemble& e, double tol,
                            const SolveOptions& opts) {
  require(e.dim() == phi->input_dim(), ErrorKind::invalid_argument,
          "ensemble does not live on the channel input space");
  const DensityMatrix rho_av = average_state(e);
  require(set.contains(rho_av.matrix(), 1e-6), ErrorKind::invalid_argument,
          "ensemble average lies outside the constraint set");

  const double chi = holevo_quantity(*phi, e);
  const Mat p_ref = phi->pullback_log_output(phi->apply(rho_av.matrix()));

  double adversary = -kInf;
  std::optional<Ensemble> witness;

  switch (set.kind()) {
    case ConstraintSet::Kind::full_simplex: {
      // Extremal adversaries are single pure states.
      SolveReport rep = minimize_pure_state(phi, p_ref, opts);
      adversary = -rep.value;
      if (rep.arg_state) witness = Ensemble({{1.0, *rep.arg_state}});
      break;
    }
    case ConstraintSet::Kind::fixed_state: {
      SolveReport rep =
          minimize_decomposition(phi, set.state(), p_ref, opts);
      adversary = -rep.value;
      witness = rep.argmax;
      break;
    }
    case ConstraintSet::Kind::linear: {
      EnsembleProblem prob;
      prob.dim = phi->input_dim();
      prob.terms.push_back({0.0, -1.0, phi});
      prob.linear = -p_ref;
      prob.ineq = set.terms();
      SolveReport rep = maximize_free_ensemble(prob, opts);
      adversary = rep.value;
      witness = rep.argmax;
      break;
    }
  }

  Certificate cert;
  cert.kind = Certificate::Kind::max_distance;
  cert.reference = chi;
  cert.adversary_value = adversary;
  cert.worst_violation = adversary - chi;
  cert.passed = cert.worst_violation <= tol;
  cert.witness = std::move(witness);
  return cert;
}

Certificate kkt_certificate(const ChannelPtr& phi, const ConstraintSet& set,
                            const DensityMatrix& rho_av, double tol,
                            const SolveOptions& opts) {
  require(set.kind() == ConstraintSet::Kind::linear, ErrorKind::invalid_argument,
          "KKT certificate needs linear constraints");
  require(set.contains(rho_av.matrix(), 1e-8), ErrorKind::invalid_argument,
          "rho_av is infeasible");
  // Slater condition; without an interior the Lemma-1 route (relax each level
  // to alpha_k + 1/m and pass to the limit) is the caller's fallback.
  require(find_strictly_feasible(set.dim(), set.terms(), 1e-7, opts).has_value(),
          ErrorKind::invalid_argument,
          "constraint set has empty interior (Slater fails); relax the levels "
          "to alpha_k + 1/m and use the outer-approximation path");

  const std::size_t m = set.terms().size();
  const Eigen::Index dim = set.dim();
  const double chi_at = chi_function(phi, rho_av, opts).value;

  std::vector<int> active;
  for (std::size_t k = 0; k < m; ++k) {
    const double v =
        (set.terms()[k].a * rho_av.matrix()).trace().real() - set.terms()[k].alpha;
    if (v > -1e-6) active.push_back(static_cast<int>(k));
  }

  // Probe: V(p) = max_rho [chi(rho) + sum p_k Tr Abar_k rho] - value at rho_av.
  auto probe = [&](const std::vector<double>& p) {
    Mat l = Mat::Zero(dim, dim);
    double at_rho = chi_at;
    for (std::size_t k = 0; k < m; ++k) {
      Mat abar = Mat::Identity(dim, dim) - set.terms()[k].a;
      l += p[k] * abar;
      at_rho += p[k] * (abar * rho_av.matrix()).trace().real();
    }
    EnsembleProblem prob;
    prob.dim = dim;
    prob.terms.push_back({1.0, -1.0, phi});
    prob.linear = l;
    SolveOptions popts = opts;
    popts.restarts = std::max(4, opts.restarts / 2);
    SolveReport rep = maximize_free_ensemble(prob, popts);
    return rep.value - at_rho;
  };

  std::vector<double> p(m, 0.0);
  if (!active.empty()) {
    // Coordinate golden-section descent on the active multipliers; V is convex.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < (active.size() > 1 ? 2 : 1); ++sweep) {
      for (int k : active) {
        double lo = 0.0, hi = 8.0;
        auto eval_at = [&](double x) {
          std::vector<double> q = p;
          q[static_cast<std::size_t>(k)] = x;
          return probe(q);
        };
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = eval_at(x1), f2 = eval_at(x2);
        for (int it = 0; it < 18; ++it) {
          if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval_at(x1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval_at(x2);
          }
        }
        p[static_cast<std::size_t>(k)] = 0.5 * (lo + hi);
      }
    }
  }

  const double v_final = probe(p);
  double comp_slack = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double v =
        (set.terms()[k].a * rho_av.matrix()).trace().real() - set.terms()[k].alpha;
    comp_slack = std::max(comp_slack, std::abs(p[k] * v));
  }

  Certificate cert;
  cert.kind = Certificate::Kind::kkt;
  cert.reference = chi_at;
  cert.adversary_value = chi_at + v_final;
  cert.multipliers = std::move(p);
  cert.worst_violation = std::max(v_final, comp_slack);
  cert.passed = cert.worst_violation <= tol;
  return cert;
}

SolveReport eof(const DensityMatrix& sigma, Eigen::Index dim_h,
                Eigen::Index dim_k, const SolveOptions& opts) {
  require(dim_h * dim_k == sigma.dim(), ErrorKind::invalid_argument,
          "dims do not factor the state dimension");
  auto marginal_channel = partial_trace_channel(dim_h, dim_k, KeepFactor::first);
  SolveReport inner = minimize_decomposition(marginal_channel, sigma, Mat(), opts);
  inner.convex_closure = inner.value;  // E_F is the convex closure itself
  return inner;
}

}  // namespace qclab
