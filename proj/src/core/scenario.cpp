#include "scenario.hpp"

#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace qclab {

namespace {

// ---------------------------------------------------------------------------
// Task context and argument helpers
// ---------------------------------------------------------------------------

struct TaskContext {
  const std::map<std::string, ChannelPtr>* channels = nullptr;
  const std::map<std::string, ConstraintSet>* constraints = nullptr;
  SolveOptions default_opts;
  std::uint64_t task_seed = 1;

  const Json& need(const Json& args, const char* key) const {
    require(args.contains(key), ErrorKind::validation,
            std::string("task argument '") + key + "' is missing");
    return args.at(key);
  }

  ChannelPtr channel_arg(const Json& args, const char* key) const {
    const Json& j = need(args, key);
    if (j.is_string()) {
      auto it = channels->find(j.get<std::string>());
      require(it != channels->end(), ErrorKind::validation,
              "unknown channel name: " + j.get<std::string>());
      return it->second;
    }
    return channel_from_json(j);
  }

  ConstraintSet constraint_arg(const Json& args, const char* key) const {
    const Json& j = need(args, key);
    if (j.is_string()) {
      auto it = constraints->find(j.get<std::string>());
      require(it != constraints->end(), ErrorKind::validation,
              "unknown constraint name: " + j.get<std::string>());
      return it->second;
    }
    return constraint_from_json(j);
  }

  Mat matrix_arg(const Json& args, const char* key) const {
    return matrix_from_json(need(args, key));
  }

  DensityMatrix state_arg(const Json& args, const char* key) const {
    const Json& j = need(args, key);
    if (j.is_object() && j.contains("random")) {
      const Json& r = j.at("random");
      return random_state(static_cast<Eigen::Index>(parse_size(r.at("dim"))),
                          static_cast<Eigen::Index>(parse_size(r.at("rank"))),
                          parse_seed(r.at("seed")));
    }
    return DensityMatrix(matrix_from_json(j));
  }

  Ensemble ensemble_arg(const Json& args, const char* key) const {
    const Json& j = need(args, key);
    if (j.is_object() && j.contains("random")) {
      const Json& r = j.at("random");
      return random_ensemble(static_cast<Eigen::Index>(parse_size(r.at("dim"))),
                             static_cast<Eigen::Index>(parse_size(r.at("n"))),
                             parse_seed(r.at("seed")));
    }
    return ensemble_from_json(j);
  }

  HybridState hybrid_arg(const Json& args, const char* key) const {
    const Json& j = need(args, key);
    require(j.is_object() && j.contains("parts"), ErrorKind::validation,
            "hybrid state needs a parts array");
    std::vector<Mat> parts;
    for (const auto& p : j.at("parts")) parts.push_back(matrix_from_json(p));
    return HybridState(std::move(parts));
  }

  SolveOptions opts_arg(const Json& args) const {
    SolveOptions o = default_opts;
    o.seed = task_seed;
    if (args.contains("opts")) {
      const Json& j = args.at("opts");
      if (j.contains("restarts")) o.restarts = j.at("restarts").get<int>();
      if (j.contains("max_iters")) o.max_iters = j.at("max_iters").get<int>();
      if (j.contains("members")) o.members = j.at("members").get<int>();
      if (j.contains("seed")) o.seed = parse_seed(j.at("seed"));
      if (j.contains("tol")) o.rel_tol = j.at("tol").get<double>();
    }
    return o;
  }

  std::vector<std::uint64_t> sizes_arg(const Json& args, const char* key) const {
    std::vector<std::uint64_t> out;
    for (const auto& d : need(args, key)) out.push_back(parse_size(d));
    return out;
  }
};

struct TaskOutput {
  Json result;
  std::optional<std::string> csv;
};

using Handler = std::function<TaskOutput(const TaskContext&, const Json&)>;

struct OpInfo {
  Handler fn;
  bool stochastic = false;
};

std::string gap_reports_csv(const std::vector<GapReport>& reports,
                            std::uint64_t seed) {
  std::ostringstream os;
  os << "instance_id,lhs,rhs,gap,bound,within_bound,seed\n";
  int idx = 0;
  for (const auto& r : reports) {
    char line[256];
    std::snprintf(line, sizeof(line), "%s-%d,%.12g,%.12g,%.12g,%.12g,%s,%llu\n",
                  r.check.c_str(), idx++, r.lhs, r.rhs, r.gap,
                  r.bound ? *r.bound : std::nan(""),
                  r.within_bound ? "true" : "false",
                  static_cast<unsigned long long>(seed));
    os << line;
  }
  return os.str();
}

Json gap_reports_json(const std::vector<GapReport>& reports) {
  Json arr = Json::array();
  bool all = true;
  for (const auto& r : reports) {
    arr.push_back(gap_report_to_json(r));
    all &= r.within_bound;
  }
  return Json{{"reports", std::move(arr)}, {"all_within_bound", all}};
}

const std::map<std::string, OpInfo>& registry() {
  static const std::map<std::string, OpInfo> reg = [] {
    std::map<std::string, OpInfo> m;

    // --- spectral-core ---
    m["entropy"] = {[](const TaskContext& ctx, const Json& args) {
      PositiveOperator s(ctx.matrix_arg(args, "state"));
      return TaskOutput{Json{{"value", json_real(entropy(s))}}, {}};
    }};
    m["relative_entropy"] = {[](const TaskContext& ctx, const Json& args) {
      const double v = relative_entropy_of(ctx.matrix_arg(args, "sigma"),
                                           ctx.matrix_arg(args, "varsigma"));
      return TaskOutput{Json{{"value", json_real(v)}}, {}};
    }};
    m["trace_distance"] = {[](const TaskContext& ctx, const Json& args) {
      const double v = trace_distance_of(ctx.matrix_arg(args, "a"),
                                         ctx.matrix_arg(args, "b"));
      return TaskOutput{Json{{"value", json_real(v)}}, {}};
    }};
    m["partial_trace"] = {[](const TaskContext& ctx, const Json& args) {
      const Mat s = ctx.matrix_arg(args, "state");
      const auto dh = static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim_h")));
      const auto dk = static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim_k")));
      const std::string keep = args.value("keep", "first");
      Mat out = partial_trace(s, dh, dk,
                              keep == "first" ? KeepFactor::first
                                              : KeepFactor::second);
      return TaskOutput{Json{{"matrix", matrix_to_json(out)},
                             {"trace", out.trace().real()}},
                        {}};
    }};

    // --- states-ensembles ---
    m["average_state"] = {[](const TaskContext& ctx, const Json& args) {
      DensityMatrix avg = average_state(ctx.ensemble_arg(args, "ensemble"));
      return TaskOutput{Json{{"matrix", matrix_to_json(avg.matrix())},
                             {"entropy", entropy(avg)}},
                        {}};
    }};
    m["hjw_ensemble"] = {[](const TaskContext& ctx, const Json& args) {
      DensityMatrix rho = ctx.state_arg(args, "state");
      const auto n = static_cast<Eigen::Index>(parse_size(ctx.need(args, "n")));
      Mat mix;
      if (args.contains("mix")) {
        mix = ctx.matrix_arg(args, "mix");
      } else {
        Rng rng(args.contains("seed") ? parse_seed(args.at("seed"))
                                      : ctx.task_seed);
        mix = haar_isometry(rng, n, psd_rank(rho));
      }
      Ensemble e = hjw_ensemble(rho, n, mix);
      const double dev =
          (average_state(e).matrix() - rho.matrix()).cwiseAbs().maxCoeff();
      Json out = ensemble_to_json(e);
      out["recombination_dev"] = json_real(dev);
      return TaskOutput{std::move(out), {}};
    }, true};
    m["random_state"] = {[](const TaskContext& ctx, const Json& args) {
      DensityMatrix rho = random_state(
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim"))),
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "rank"))),
          parse_seed(ctx.need(args, "seed")));
      return TaskOutput{Json{{"matrix", matrix_to_json(rho.matrix())},
                             {"entropy", entropy(rho)}},
                        {}};
    }, true};
    m["random_ensemble"] = {[](const TaskContext& ctx, const Json& args) {
      Ensemble e = random_ensemble(
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim"))),
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "n"))),
          parse_seed(ctx.need(args, "seed")));
      return TaskOutput{ensemble_to_json(e), {}};
    }, true};

    // --- channels ---
    m["make_channel"] = {[](const TaskContext& ctx, const Json& args) {
      ChannelPtr c = ctx.channel_arg(args, "channel");
      Json out = channel_to_json(c);
      out["dim_in"] = c->input_dim();
      return TaskOutput{std::move(out), {}};
    }};
    m["apply"] = {[](const TaskContext& ctx, const Json& args) {
      ChannelPtr c = ctx.channel_arg(args, "channel");
      BlockOperator y = args.contains("hybrid")
                            ? c->apply_hybrid(ctx.hybrid_arg(args, "hybrid"))
                            : c->apply(ctx.state_arg(args, "state").matrix());
      return TaskOutput{block_operator_to_json(y), {}};
    }};
    m["tensor_channels"] = {[](const TaskContext& ctx, const Json& args) {
      auto t = tensor_channels(ctx.channel_arg(args, "left"),
                               ctx.channel_arg(args, "right"));
      return TaskOutput{channel_to_json(t), {}};
    }};
    m["direct_sum_mixture"] = {[](const TaskContext& ctx, const Json& args) {
      std::vector<ChannelPtr> comps;
      for (const auto& c : ctx.need(args, "components"))
        comps.push_back(c.is_string()
                            ? ctx.channels->at(c.get<std::string>())
                            : channel_from_json(c));
      std::vector<double> probs;
      for (const auto& p : ctx.need(args, "probs")) probs.push_back(p.get<double>());
      auto mix = direct_sum_mixture(std::move(comps), std::move(probs));
      return TaskOutput{channel_to_json(mix), {}};
    }};
    m["holevo_quantity"] = {[](const TaskContext& ctx, const Json& args) {
      ChannelPtr c = ctx.channel_arg(args, "channel");
      const double v = holevo_quantity(*c, ctx.ensemble_arg(args, "ensemble"));
      return TaskOutput{Json{{"value", json_real(v)}}, {}};
    }};
    m["donald_residual"] = {[](const TaskContext& ctx, const Json& args) {
      ChannelPtr c = ctx.channel_arg(args, "channel");
      const double v = donald_residual(*c, ctx.ensemble_arg(args, "ensemble"),
                                       ctx.state_arg(args, "omega"));
      return TaskOutput{Json{{"value", json_real(v)}}, {}};
    }};
    m["psi_sub_a"] = {[](const TaskContext& ctx, const Json& args) {
      auto pa = psi_sub_a(ctx.channel_arg(args, "psi"),
                          ctx.matrix_arg(args, "A"));
      Mat sigma = ctx.matrix_arg(args, "sigma");
      Mat out = pa->apply_mat(sigma);
      const Eigen::Index dh = ctx.matrix_arg(args, "A").rows();
      const Eigen::Index dk = sigma.rows() / dh;
      const double tr_identity =
          (kron(ctx.matrix_arg(args, "A"), Mat::Identity(dk, dk)) * sigma)
              .trace()
              .real();
      return TaskOutput{
          Json{{"matrix", matrix_to_json(out)},
               {"trace", out.trace().real()},
               {"trace_identity_dev",
                json_real(std::abs(out.trace().real() - tr_identity))}},
          {}};
    }};
    m["measurement_channel"] = {[](const TaskContext& ctx, const Json& args) {
      Mat basis = ctx.matrix_arg(args, "basis");
      Mat sigma = ctx.matrix_arg(args, "sigma");
      const auto dk = static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim_k")));
      auto outcomes = measure_first_factor(sigma, basis, dk);
      Json arr = Json::array();
      double after = 0.0;
      for (const auto& [p, st] : outcomes) {
        arr.push_back({{"p", p}, {"state", matrix_to_json(st)}});
        after += p * entropy_of(st);
      }
      return TaskOutput{Json{{"outcomes", std::move(arr)},
                             {"prior_entropy", entropy_of(sigma)},
                             {"posterior_entropy", after},
                             {"entropy_reduced", after <= entropy_of(sigma) + 1e-9}},
                        {}};
    }};

    // --- shor-extensions ---
    auto shor_common = [](const TaskContext& ctx, const Json& args,
                          bool tilde, bool dp) {
      ChannelPtr base = ctx.channel_arg(args, "base");
      const std::uint64_t d = parse_size(ctx.need(args, "d"));
      ChannelPtr ext;
      if (tilde)
        ext = dp ? ChannelPtr(shor_tilde_dp(base, ctx.matrix_arg(args, "A"),
                                            ctx.need(args, "p").get<double>(), d))
                 : ChannelPtr(shor_tilde(base, ctx.matrix_arg(args, "E"),
                                         ctx.need(args, "q").get<double>(), d));
      else
        ext = dp ? ChannelPtr(shor_hat_dp(base, ctx.matrix_arg(args, "A"),
                                          ctx.need(args, "p").get<double>(), d))
                 : ChannelPtr(shor_hat(base, ctx.matrix_arg(args, "E"),
                                       ctx.need(args, "q").get<double>(), d));
      Json out = channel_to_json(ext);
      if (tilde && args.contains("state")) {
        BlockOperator y = ext->apply(ctx.state_arg(args, "state").matrix());
        out["output"] = block_operator_to_json(y);
      }
      if (!tilde && args.contains("hybrid")) {
        BlockOperator y = ext->apply_hybrid(ctx.hybrid_arg(args, "hybrid"));
        out["output"] = block_operator_to_json(y);
      }
      return TaskOutput{std::move(out), {}};
    };
    m["shor_hat"] = {[shor_common](const TaskContext& ctx, const Json& args) {
      return shor_common(ctx, args, false, false);
    }};
    m["shor_hat_dp"] = {[shor_common](const TaskContext& ctx, const Json& args) {
      return shor_common(ctx, args, false, true);
    }};
    m["shor_tilde"] = {[shor_common](const TaskContext& ctx, const Json& args) {
      return shor_common(ctx, args, true, false);
    }};
    m["shor_tilde_dp"] = {[shor_common](const TaskContext& ctx, const Json& args) {
      return shor_common(ctx, args, true, true);
    }};
    m["tilde_entropy_closed_form"] = {[](const TaskContext& ctx,
                                         const Json& args) {
      ChannelPtr base = ctx.channel_arg(args, "base");
      const Mat a = ctx.matrix_arg(args, "A");
      const double p = ctx.need(args, "p").get<double>();
      const std::uint64_t d = parse_size(ctx.need(args, "d"));
      const Mat rho = ctx.state_arg(args, "state").matrix();
      const double closed = tilde_entropy_closed_form(*base, a, p, d, rho);
      const double direct = shor_tilde_dp(base, a, p, d)->apply(rho).entropy();
      return TaskOutput{Json{{"value", closed},
                             {"direct", direct},
                             {"deviation", json_real(std::abs(closed - direct))}},
                        {}};
    }};

    // --- capacity-solvers ---
    m["chi_function"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = chi_function(ctx.channel_arg(args, "channel"),
                                     ctx.state_arg(args, "state"),
                                     ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["constrained_capacity"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = constrained_capacity(ctx.channel_arg(args, "channel"),
                                             ctx.constraint_arg(args, "constraint"),
                                             ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["min_output_entropy"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = min_output_entropy(ctx.channel_arg(args, "channel"),
                                           ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["nu_H"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = nu_h(ctx.channel_arg(args, "channel"),
                             ctx.matrix_arg(args, "A"), ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["conjugate_H"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = conjugate_h(ctx.channel_arg(args, "channel"),
                                    ctx.matrix_arg(args, "X"), ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["penalized_capacity"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = penalized_capacity(
          ctx.channel_arg(args, "channel"), ctx.matrix_arg(args, "A"),
          ctx.need(args, "p").get<double>(), ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};
    m["certify_optimal"] = {[](const TaskContext& ctx, const Json& args) {
      Certificate cert = certify_optimal(
          ctx.channel_arg(args, "channel"), ctx.constraint_arg(args, "constraint"),
          ctx.ensemble_arg(args, "ensemble"), args.value("tol", 1e-4),
          ctx.opts_arg(args));
      return TaskOutput{certificate_to_json(cert), {}};
    }, true};
    m["kkt_certificate"] = {[](const TaskContext& ctx, const Json& args) {
      Certificate cert = kkt_certificate(
          ctx.channel_arg(args, "channel"), ctx.constraint_arg(args, "constraint"),
          ctx.state_arg(args, "state"), args.value("tol", 2e-3),
          ctx.opts_arg(args));
      return TaskOutput{certificate_to_json(cert), {}};
    }, true};
    m["eof"] = {[](const TaskContext& ctx, const Json& args) {
      SolveReport rep = eof(
          ctx.state_arg(args, "state"),
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim_h"))),
          static_cast<Eigen::Index>(parse_size(ctx.need(args, "dim_k"))),
          ctx.opts_arg(args));
      return TaskOutput{solve_report_to_json(rep), {}};
    }, true};

    // --- additivity-lab ---
    m["inequality_report"] = {[](const TaskContext& ctx, const Json& args) {
      InequalityBundle bundle = inequality_report(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.state_arg(args, "state"), ctx.opts_arg(args));
      std::vector<GapReport> reports = {bundle.subadditivity, bundle.cor5,
                                        bundle.product_residual};
      Json out = gap_reports_json(reports);
      return TaskOutput{std::move(out), gap_reports_csv(reports, ctx.task_seed)};
    }, true};
    m["theorem2_gap"] = {[](const TaskContext& ctx, const Json& args) {
      GapReport rep = theorem2_gap(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.state_arg(args, "rho"), ctx.state_arg(args, "varrho"),
          ctx.opts_arg(args));
      return TaskOutput{gap_report_to_json(rep),
                        gap_reports_csv({rep}, ctx.task_seed)};
    }, true};
    m["corollary7_bound"] = {[](const TaskContext& ctx, const Json& args) {
      GapReport rep = corollary7_bound(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.state_arg(args, "rho"), ctx.state_arg(args, "varrho"),
          ctx.opts_arg(args));
      return TaskOutput{gap_report_to_json(rep),
                        gap_reports_csv({rep}, ctx.task_seed)};
    }, true};
    m["prop3_check"] = {[](const TaskContext& ctx, const Json& args) {
      std::optional<ConstraintSet> set_b;
      if (args.contains("constraint"))
        set_b = ctx.constraint_arg(args, "constraint");
      GapReport rep = prop3_check(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.matrix_arg(args, "E"), ctx.need(args, "q").get<double>(),
          parse_size(ctx.need(args, "d")), set_b, ctx.opts_arg(args));
      return TaskOutput{gap_report_to_json(rep),
                        gap_reports_csv({rep}, ctx.task_seed)};
    }, true};
    m["asymp_probe"] = {[](const TaskContext& ctx, const Json& args) {
      std::optional<ConstraintSet> set_b;
      if (args.contains("constraint"))
        set_b = ctx.constraint_arg(args, "constraint");
      ChannelPtr psi;
      if (args.contains("psi")) psi = ctx.channel_arg(args, "psi");
      auto reports = asymp_probe(
          ctx.channel_arg(args, "phi"), ctx.matrix_arg(args, "A"),
          ctx.need(args, "p").get<double>(), ctx.sizes_arg(args, "d_list"), psi,
          set_b, ctx.opts_arg(args));
      return TaskOutput{gap_reports_json(reports),
                        gap_reports_csv(reports, ctx.task_seed)};
    }, true};
    m["theorem3_ii_gap"] = {[](const TaskContext& ctx, const Json& args) {
      GapReport rep = theorem3_ii_gap(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.matrix_arg(args, "A"), ctx.matrix_arg(args, "B"),
          ctx.opts_arg(args));
      return TaskOutput{gap_report_to_json(rep),
                        gap_reports_csv({rep}, ctx.task_seed)};
    }, true};
    m["tilde_moe_probe"] = {[](const TaskContext& ctx, const Json& args) {
      auto reports = tilde_moe_probe(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.matrix_arg(args, "A"), ctx.need(args, "p").get<double>(),
          ctx.matrix_arg(args, "B"), ctx.need(args, "r").get<double>(),
          ctx.sizes_arg(args, "d_list"), ctx.sizes_arg(args, "e_list"),
          ctx.opts_arg(args));
      return TaskOutput{gap_reports_json(reports),
                        gap_reports_csv(reports, ctx.task_seed)};
    }, true};
    m["s_c_add"] = {[](const TaskContext& ctx, const Json& args) {
      GapReport rep = s_c_add_report(ctx.channel_arg(args, "psi"),
                                     ctx.state_arg(args, "rho"),
                                     ctx.opts_arg(args));
      return TaskOutput{gap_report_to_json(rep),
                        gap_reports_csv({rep}, ctx.task_seed)};
    }, true};

    // --- relent-curves ---
    m["sample_curves"] = {[](const TaskContext& ctx, const Json& args) {
      DensityMatrix sigma = ctx.state_arg(args, "sigma");
      DensityMatrix varsigma = ctx.state_arg(args, "varsigma");
      CurvePair cp;
      if (args.contains("grid")) {
        const Json& g = args.at("grid");
        RVec grid(static_cast<Eigen::Index>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i)
          grid(static_cast<Eigen::Index>(i)) = g.at(i).get<double>();
        cp = sample_curves(sigma, varsigma, grid);
      } else {
        cp = sample_curves(sigma, varsigma);
      }
      std::ostringstream csv;
      csv << "x,f,g,bound\n";
      Json jf = Json::array(), jg = Json::array(), jx = Json::array();
      const double ln2 = std::log(2.0);
      for (Eigen::Index i = 0; i < cp.grid.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g\n",
                      cp.grid(i), cp.f_samples(i), cp.g_samples(i),
                      cp.pinsker_c * cp.grid(i) * cp.grid(i) / ln2);
        csv << line;
        jx.push_back(cp.grid(i));
        jf.push_back(json_real(cp.f_samples(i)));
        jg.push_back(json_real(cp.g_samples(i)));
      }
      return TaskOutput{Json{{"grid", jx},
                             {"f", jf},
                             {"g", jg},
                             {"equal_support", cp.equal_support},
                             {"pinsker_c", cp.pinsker_c},
                             {"convex_ok", cp.convex_ok}},
                        csv.str()};
    }};
    m["prop5_suite"] = {[](const TaskContext& ctx, const Json& args) {
      Prop5Report rep = prop5_suite(ctx.state_arg(args, "sigma"),
                                    ctx.state_arg(args, "varsigma"));
      return TaskOutput{prop5_report_to_json(rep), {}};
    }};
    m["mixture_curve"] = {[](const TaskContext& ctx, const Json& args) {
      RVec grid(11);
      for (int k = 0; k < 11; ++k) grid(k) = k / 10.0;
      if (args.contains("grid")) {
        const Json& g = args.at("grid");
        grid = RVec(static_cast<Eigen::Index>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i)
          grid(static_cast<Eigen::Index>(i)) = g.at(i).get<double>();
      }
      MixtureCurveReport rep = mixture_curve(
          ctx.channel_arg(args, "phi"), ctx.channel_arg(args, "psi"),
          ctx.ensemble_arg(args, "phi_ensemble"),
          ctx.ensemble_arg(args, "psi_ensemble"), ctx.ensemble_arg(args, "probe"),
          grid, args.value("probe_is_optimal", false));
      Json jh = Json::array(), jf = Json::array(), jx = Json::array();
      std::ostringstream csv;
      csv << "x,h,f\n";
      for (Eigen::Index i = 0; i < rep.grid.size(); ++i) {
        jx.push_back(rep.grid(i));
        jh.push_back(json_real(rep.h_samples(i)));
        jf.push_back(json_real(rep.f_samples(i)));
        char line[128];
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", rep.grid(i),
                      rep.h_samples(i), rep.f_samples(i));
        csv << line;
      }
      Json out{{"grid", jx},
               {"h", jh},
               {"f", jf},
               {"delta", json_real(rep.delta)},
               {"max_identity_dev", json_real(rep.max_identity_dev)},
               {"identity_ok", rep.identity_ok}};
      if (rep.fprime_at_1) {
        out["fprime_at_1"] = json_real(*rep.fprime_at_1);
        out["fprime_le_delta"] = rep.fprime_le_delta;
      }
      return TaskOutput{std::move(out), csv.str()};
    }, true};

    return m;
  }();
  return reg;
}

// ---------------------------------------------------------------------------
// Assertion evaluation
// ---------------------------------------------------------------------------

const Json* resolve_field(const Json& root, const std::string& path) {
  const Json* cur = &root;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos
                                                 ? std::string::npos
                                                 : dot - pos);
    if (cur->is_array()) {
      char* end = nullptr;
      const long idx = std::strtol(key.c_str(), &end, 10);
      if (end == key.c_str() || idx < 0 ||
          static_cast<std::size_t>(idx) >= cur->size())
        return nullptr;
      cur = &cur->at(static_cast<std::size_t>(idx));
    } else if (cur->is_object() && cur->contains(key)) {
      cur = &cur->at(key);
    } else {
      return nullptr;
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

struct AssertionOutcome {
  std::string desc;
  bool passed = false;
};

AssertionOutcome evaluate_assertion(const Json& result, const Json& spec) {
  AssertionOutcome out;
  const std::string field = spec.at("field").get<std::string>();
  const std::string op = spec.at("op").get<std::string>();
  out.desc = field + " " + op;
  const Json* v = resolve_field(result, field);
  if (v == nullptr) {
    out.desc += " (field missing)";
    return out;
  }
  if (op == "true" || op == "false") {
    out.passed = v->is_boolean() && v->get<bool>() == (op == "true");
    return out;
  }
  if (!v->is_number()) {
    out.desc += " (not numeric)";
    return out;
  }
  const double x = v->get<double>();
  const double target = spec.value("value", 0.0);
  const double tolerance = spec.value("tol", 0.0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), " (got %.9g, want %.9g tol %.3g)", x, target,
                tolerance);
  out.desc += buf;
  if (op == "le")
    out.passed = x <= target + tolerance;
  else if (op == "ge")
    out.passed = x >= target - tolerance;
  else if (op == "approx" || op == "eq")
    out.passed = std::abs(x - target) <= tolerance;
  else
    out.desc += " (unknown op)";
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

Json RunSummary::to_json() const {
  Json arr = Json::array();
  for (const auto& t : tasks) {
    Json rec{{"index", t.index},
             {"op", t.op},
             {"ok", t.ok},
             {"assertions", t.assertions}};
    if (!t.out_file.empty()) rec["out"] = t.out_file;
    rec["result"] = t.result;
    arr.push_back(std::move(rec));
  }
  return Json{{"all_passed", all_passed}, {"tasks", std::move(arr)}};
}

std::vector<std::string> task_names() {
  std::vector<std::string> names;
  for (const auto& [name, info] : registry()) names.push_back(name);
  return names;
}

RunSummary run_scenario(const Json& scenario, const RunOptions& opts) {
  require(scenario.is_object(), ErrorKind::parse,
          "scenario must be a JSON object");

  // Named channels and constraints; a bad definition names the offender.
  std::map<std::string, ChannelPtr> channels;
  if (scenario.contains("channels")) {
    for (const auto& [name, spec] : scenario.at("channels").items()) {
      try {
        channels[name] = channel_from_json(spec);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse) throw;
        fail(ErrorKind::validation,
             "channel '" + name + "' failed validation: " + e.what());
      }
    }
  }
  std::map<std::string, ConstraintSet> constraints;
  if (scenario.contains("constraints")) {
    for (const auto& [name, spec] : scenario.at("constraints").items()) {
      try {
        constraints.emplace(name, constraint_from_json(spec));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse) throw;
        fail(ErrorKind::validation,
             "constraint '" + name + "' failed validation: " + e.what());
      }
    }
  }

  const Json tasks = scenario.value("tasks", Json::array());
  require(tasks.is_array(), ErrorKind::parse, "tasks must be an array");

  // Validation pass: ops exist; seed present when a stochastic task exists.
  bool any_stochastic = false;
  for (const auto& t : tasks) {
    require(t.is_object() && t.contains("op"), ErrorKind::validation,
            "every task needs an op");
    const std::string op = t.at("op").get<std::string>();
    auto it = registry().find(op);
    require(it != registry().end(), ErrorKind::validation,
            "unknown operation: " + op);
    any_stochastic |= it->second.stochastic;
  }
  std::uint64_t base_seed = 1;
  if (opts.seed_override) {
    base_seed = *opts.seed_override;
  } else if (scenario.contains("seed")) {
    base_seed = parse_seed(scenario.at("seed"));
  } else {
    require(!any_stochastic, ErrorKind::validation,
            "scenario contains stochastic tasks but declares no seed");
  }

  SolveOptions defaults;
  if (scenario.contains("tolerances")) {
    const Json& tl = scenario.at("tolerances");
    if (tl.contains("restarts")) defaults.restarts = tl.at("restarts").get<int>();
    if (tl.contains("max_iters")) defaults.max_iters = tl.at("max_iters").get<int>();
    if (tl.contains("tol")) defaults.rel_tol = tl.at("tol").get<double>();
  }
  if (opts.restarts_override) defaults.restarts = *opts.restarts_override;
  if (opts.max_iters_override) defaults.max_iters = *opts.max_iters_override;
  if (opts.tol_override) defaults.rel_tol = *opts.tol_override;
  defaults.jobs = 1;  // parallelism is spent at task level

  if (opts.write_reports) std::filesystem::create_directories(opts.out_dir);

  RunSummary summary;
  summary.tasks.resize(tasks.size());

  // Dependency-aware task-level parallelism: tasks run concurrently unless
  // they declare depends_on, which forces ordering.
  std::vector<std::vector<int>> deps(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks.at(i).contains("depends_on"))
      for (const auto& d : tasks.at(i).at("depends_on"))
        deps[i].push_back(d.get<int>());

  auto run_task = [&](int index) {
    const Json& t = tasks.at(static_cast<std::size_t>(index));
    TaskRecord rec;
    rec.index = index;
    rec.op = t.at("op").get<std::string>();

    TaskContext ctx;
    ctx.channels = &channels;
    ctx.constraints = &constraints;
    ctx.default_opts = defaults;
    ctx.task_seed = base_seed * 0x9e3779b97f4a7c15ull +
                    static_cast<std::uint64_t>(index) * 0x2545f4914f6cdd1dull + 1;

    const Json args = t.value("args", Json::object());
    TaskOutput output = registry().at(rec.op).fn(ctx, args);
    rec.result = std::move(output.result);

    rec.assertions = Json::array();
    if (t.contains("require")) {
      for (const auto& spec : t.at("require")) {
        AssertionOutcome a = evaluate_assertion(rec.result, spec);
        rec.assertions.push_back({{"check", a.desc}, {"passed", a.passed}});
        rec.ok &= a.passed;
      }
    }

    if (t.contains("out") && opts.write_reports) {
      rec.out_file = t.at("out").get<std::string>();
      const auto path = std::filesystem::path(opts.out_dir) / rec.out_file;
      std::ofstream os(path);
      require(os.good(), ErrorKind::validation,
              "cannot open output file " + path.string());
      if (rec.out_file.size() > 4 &&
          rec.out_file.substr(rec.out_file.size() - 4) == ".csv") {
        require(output.csv.has_value(), ErrorKind::validation,
                "operation " + rec.op + " produces no CSV output");
        os << *output.csv;
      } else {
        os << rec.result.dump(2) << "\n";
      }
    }
    summary.tasks[static_cast<std::size_t>(index)] = std::move(rec);
  };

  const int n = static_cast<int>(tasks.size());
  if (opts.jobs <= 1) {
    for (int i = 0; i < n; ++i) run_task(i);
  } else {
    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 run, 2 done
    std::mutex mu;
    std::condition_variable cv;
    auto ready = [&](int i) {
      for (int d : deps[static_cast<std::size_t>(i)])
        if (d >= 0 && d < n && state[static_cast<std::size_t>(d)] != 2)
          return false;
      return true;
    };
    auto worker = [&] {
      for (;;) {
        int mine = -1;
        {
          std::unique_lock<std::mutex> lk(mu);
          cv.wait(lk, [&] {
            for (int i = 0; i < n; ++i)
              if (state[static_cast<std::size_t>(i)] == 0 && ready(i)) return true;
            for (int i = 0; i < n; ++i)
              if (state[static_cast<std::size_t>(i)] != 2) return false;
            return true;
          });
          for (int i = 0; i < n; ++i)
            if (state[static_cast<std::size_t>(i)] == 0 && ready(i)) {
              mine = i;
              state[static_cast<std::size_t>(i)] = 1;
              break;
            }
          if (mine < 0) return;
        }
        run_task(mine);
        {
          std::lock_guard<std::mutex> lk(mu);
          state[static_cast<std::size_t>(mine)] = 2;
        }
        cv.notify_all();
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(opts.jobs, std::max(1, n)); ++t)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& t : summary.tasks) summary.all_passed &= t.ok;

  if (opts.write_reports) {
    const auto path = std::filesystem::path(opts.out_dir) / "summary.json";
    std::ofstream os(path);
    os << summary.to_json().dump(2) << "\n";
  }
  return summary;
}

RunSummary run_scenario_file(const std::string& path, const RunOptions& opts) {
  std::ifstream is(path);
  require(is.good(), ErrorKind::parse, "cannot open scenario file " + path);
  Json scenario;
  try {
    scenario = Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("scenario parse error: ") + e.what());
  }
  return run_scenario(scenario, opts);
}

// ---------------------------------------------------------------------------
// Selftest
// ---------------------------------------------------------------------------

namespace {

struct QuickCheck {
  std::string name;
  std::function<void()> body;  // throws Error(assertion) on failure
};

void expect(bool cond, const std::string& witness) {
  if (!cond) fail(ErrorKind::assertion, witness);
}

void expect_near(double got, double want, double tolerance,
                 const std::string& what) {
  if (std::abs(got - want) > tolerance) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " (tol " << tolerance
       << ")";
    fail(ErrorKind::assertion, os.str());
  }
}

std::vector<QuickCheck> quick_checks() {
  std::vector<QuickCheck> checks;
  auto add = [&](std::string name, std::function<void()> body) {
    checks.push_back({std::move(name), std::move(body)});
  };
  const Mat i2 = Mat::Identity(2, 2);
  Mat p0 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  Mat p1 = Mat::Zero(2, 2);
  p1(1, 1) = 1.0;

  add("entropy-pinned", [=] {
    expect_near(entropy_of(0.5 * i2), 1.0, 1e-12, "H(I/2)");
    expect_near(entropy_of(p0), 0.0, 1e-12, "H(pure)");
    Mat flat = Mat::Zero(2, 2);
    flat(0, 0) = flat(1, 1) = 0.3;
    expect_near(entropy_of(flat), 0.6 * (1 - std::log2(0.6)), 1e-12,
                "flat spectrum bound");
  });
  add("relative-entropy-pinned", [=] {
    expect_near(relative_entropy_of(p0, 0.5 * i2), 1.0, 1e-12, "S(|0><0| || I/2)");
    expect(std::isinf(relative_entropy_of(0.5 * i2, p0)), "support sentinel");
  });
  add("trace-distance-pinned", [=] {
    expect_near(trace_distance_of(p0, p1), 2.0, 1e-12, "orthogonal pures");
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 0.9;
    d(1, 1) = 0.1;
    expect_near(trace_distance_of(d, 0.5 * i2), 0.8, 1e-12, "diag vs mixed");
  });
  add("partial-trace-bell", [=] {
    CVec v = CVec::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    Mat bell = v * v.adjoint();
    expect_near(
        (partial_trace(bell, 2, 2, KeepFactor::first) - 0.5 * i2).norm(), 0.0,
        1e-12, "bell marginal");
  });
  add("average-state-pinned", [=] {
    Ensemble e({{0.5, DensityMatrix(p0)}, {0.5, DensityMatrix(p1)}});
    expect_near((average_state(e).matrix() - 0.5 * i2).norm(), 0.0, 1e-12,
                "basis mixture");
  });
  add("hjw-eigen-ensemble", [=] {
    Ensemble e = hjw_ensemble(DensityMatrix(0.5 * i2), 2, Mat(Mat::Identity(2, 2)));
    expect(e.size() == 2, "two members");
    expect_near(e.items()[0].p, 0.5, 1e-12, "eigen weight");
  });
  add("random-state-determinism", [] {
    expect_near((random_state(3, 2, 7).matrix() -
                 random_state(3, 2, 7).matrix())
                    .cwiseAbs()
                    .maxCoeff(),
                0.0, 0.0, "same seed, same state");
  });
  add("uniform-block-closed-form", [] {
    BlockOperator b;
    b.append(UniformClassicalBlock{0.4, 1ull << 30});
    b.append(ClassicalBlock{RVec::Constant(1, 0.6)});
    expect_near(b.entropy(), 0.4 * 30 - 0.4 * std::log2(0.4) + eta(0.6), 1e-10,
                "symbolic block entropy");
  });
  add("depolarizing-pinned", [=] {
    auto dep = depolarizing_channel(1.0);
    expect_near((as_kraus(*dep).apply_mat(p0) - 0.5 * i2).norm(), 0.0, 1e-12,
                "p=1 output");
    auto dep3 = depolarizing_channel(0.3);
    Mat want = Mat::Zero(2, 2);
    want(0, 0) = 1 - 0.15;
    want(1, 1) = 0.15;
    expect_near((as_kraus(*dep3).apply_mat(p0) - want).norm(), 0.0, 1e-12,
                "closed-form output");
  });
  add("identity-dim3", [] {
    auto id3 = identity_channel(3);
    expect(as_kraus(*id3).kraus().size() == 1, "single Kraus operator");
  });
  add("tensor-dims-multiply", [] {
    auto t = tensor_channels(random_channel(2, 2, 2, 3),
                             random_channel(3, 2, 2, 5));
    expect(t->input_dim() == 6 && as_kraus(*t).output_dim() == 4,
           "(2->2)x(3->2) = 6->4");
  });
  add("direct-sum-lemma2", [=] {
    auto id2 = identity_channel(2);
    auto mix = direct_sum_mixture({id2, id2}, {0.5, 0.5});
    expect_near(mix->apply(0.5 * i2).entropy(), 2.0, 1e-10, "1 + 1 bits");
  });
  add("holevo-pinned", [=] {
    auto id2 = identity_channel(2);
    Ensemble basis({{0.5, DensityMatrix(p0)}, {0.5, DensityMatrix(p1)}});
    expect_near(holevo_quantity(*id2, basis), 1.0, 1e-12, "basis ensemble");
    Ensemble single({{1.0, random_state(2, 2, 11)}});
    expect_near(holevo_quantity(*id2, single), 0.0, 1e-12, "single member");
  });
  add("donald-at-average", [] {
    auto phi = random_channel(2, 2, 2, 13);
    Ensemble e = random_ensemble(2, 3, 17);
    expect_near(donald_residual(*phi, e, average_state(e)), 0.0, 1e-9,
                "omega = average");
  });
  add("psi-sub-a-trace-identity", [=] {
    auto psi = random_channel(2, 2, 2, 19);
    auto pa = psi_sub_a(psi, Mat(0.5 * i2));
    Mat sigma = random_state(4, 4, 23).matrix();
    expect_near(pa->apply_mat(sigma).trace().real(),
                (kron(Mat(0.5 * i2), i2) * sigma).trace().real(), 1e-10,
                "Tr Psi_A = Tr (A x I)");
  });
  add("measurement-entropy-reduction", [=] {
    Mat sigma = random_state(4, 4, 29).matrix();
    auto outs = measure_first_factor(sigma, Mat(Mat::Identity(2, 2)), 2);
    double after = 0.0;
    for (const auto& [p, st] : outs) after += p * entropy_of(st);
    expect(after <= entropy_of(sigma) + 1e-9, "posterior <= prior");
  });
  add("shor-hat-slot-readout", [=] {
    auto hat = shor_hat(identity_channel(2), Mat(i2), 0.5, 4);
    auto out = hat->apply_hybrid(HybridState::delta(p0, 2, 4));
    const auto& cls = std::get<ClassicalBlock>(out.blocks().back());
    expect_near(cls.v(3), 0.5, 1e-12, "slot j lands at entry j+1");
  });
  add("shor-tilde-pinned", [=] {
    auto t = shor_tilde(identity_channel(2), Mat(i2), 1.0, 2);
    expect_near(t->apply(0.5 * i2).entropy(), 1.0, 1e-12, "[0,1/2,1/2]");
  });
  add("tilde-closed-form", [=] {
    auto phi = random_channel(2, 2, 2, 31);
    Mat a = 0.7 * p0 + 0.2 * p1;
    Mat rho = random_state(2, 2, 37).matrix();
    expect_near(tilde_entropy_closed_form(*phi, a, 1.5, 16, rho),
                shor_tilde_dp(phi, a, 1.5, 16)->apply(rho).entropy(), 1e-10,
                "closed form vs direct");
  });
  add("chi-identity-channel", [=] {
    SolveOptions o;
    o.restarts = 6;
    o.seed = 41;
    expect_near(chi_function(identity_channel(2), DensityMatrix(0.5 * i2), o)
                    .value,
                1.0, 1e-6, "chi_Id(I/2)");
  });
  add("capacity-constant-channel", [] {
    SolveOptions o;
    o.restarts = 4;
    o.seed = 43;
    expect_near(chi_function(depolarizing_channel(1.0), random_state(2, 2, 47),
                             o)
                    .value,
                0.0, 1e-8, "constant channel");
  });
  add("moe-pinned", [] {
    SolveOptions o;
    o.restarts = 6;
    o.seed = 53;
    expect_near(min_output_entropy(identity_channel(2), o).value, 0.0, 1e-8,
                "MOE(Id)");
    expect_near(min_output_entropy(depolarizing_channel(1.0), o).value, 1.0,
                1e-8, "MOE(dep 1)");
  });
  add("nu-and-conjugate-pinned", [=] {
    SolveOptions o;
    o.restarts = 8;
    o.seed = 59;
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 0.2;
    a(1, 1) = 0.7;
    expect_near(nu_h(identity_channel(2), a, o).value, 0.2, 1e-6, "nu(Id, A)");
    Mat x = Mat::Zero(2, 2);
    x(0, 0) = 1.0;
    x(1, 1) = 3.0;
    expect_near(conjugate_h(identity_channel(2), x, o).value, 3.0, 1e-6,
                "H*(Id, X)");
  });
  add("penalized-pinned", [=] {
    SolveOptions o;
    o.restarts = 8;
    o.seed = 61;
    expect_near(penalized_capacity(identity_channel(2), Mat(i2), 1.0, o).value,
                2.0, 1e-6, "chi + TrI");
  });
  add("certificates-pinned", [=] {
    SolveOptions o;
    o.restarts = 48;
    o.seed = 67;
    Ensemble eig({{0.5, DensityMatrix(p0)}, {0.5, DensityMatrix(p1)}});
    auto id2 = identity_channel(2);
    Certificate good =
        certify_optimal(id2, ConstraintSet::full_simplex(2), eig, 1e-4, o);
    expect(good.passed, "eigen-ensemble certificate");
    Certificate bad = certify_optimal(id2, ConstraintSet::full_simplex(2),
                                      Ensemble({{1.0, DensityMatrix(p0)}}),
                                      1e-4, o);
    expect(!bad.passed && bad.witness.has_value(),
           "single-state ensemble must fail with a witness");
  });
  add("eof-pinned", [] {
    SolveOptions o;
    o.restarts = 8;
    o.seed = 71;
    CVec v = CVec::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    expect_near(eof(DensityMatrix(Mat(v * v.adjoint())), 2, 2, o).value, 1.0,
                1e-6, "EoF(Bell)");
  });
  add("curves-pinned", [=] {
    DensityMatrix s(Mat(0.9 * p0 + 0.1 * p1));
    DensityMatrix m(0.5 * i2);
    expect_near(curve_f(s, m, 1.0),
                0.9 * std::log2(1.8) + 0.1 * std::log2(0.2), 1e-10,
                "classical KL at x=1");
    DensityMatrix r = random_state(2, 2, 73);
    expect_near(curve_f(r, r, 0.7), 0.0, 1e-10, "identical states");
  });
  add("prop3-q0", [] {
    SolveOptions o;
    o.restarts = 4;
    o.max_iters = 150;
    o.seed = 79;
    auto rep = prop3_check(random_channel(2, 2, 2, 83),
                           random_channel(2, 2, 2, 89), Mat(0.5 * Mat::Identity(2, 2)),
                           0.0, 4, std::nullopt, o);
    expect(rep.gap <= tol::solver_slack, "q=0 collapses the bound");
  });
  add("theorem3-identity-pinned", [=] {
    SolveOptions o;
    o.restarts = 8;
    o.seed = 97;
    Mat a = 0.3 * p0 + 0.9 * p1, bb = 0.7 * p0 + 0.2 * p1;
    auto rep = theorem3_ii_gap(identity_channel(2), identity_channel(2), a, bb, o);
    expect_near(rep.lhs, 0.5, 1e-6, "lambda_min additivity");
  });
  return checks;
}

}  // namespace

std::vector<SelftestItem> selftest(const std::string& level, int jobs,
                                   std::ostream* progress) {
  require(level == "quick" || level == "full", ErrorKind::invalid_argument,
          "selftest level must be quick or full");
  std::vector<SelftestItem> items;
  for (const auto& check : quick_checks()) {
    SelftestItem item;
    item.name = check.name;
    try {
      check.body();
      item.passed = true;
    } catch (const Error& e) {
      item.passed = false;
      item.detail = e.what();
    }
    if (progress)
      (*progress) << (item.passed ? "[PASS] " : "[FAIL] ") << item.name
                  << (item.detail.empty() ? "" : ": " + item.detail)
                  << std::endl;
    items.push_back(std::move(item));
  }
  if (level == "full") {
    for (const auto& r : run_acceptance(jobs, progress)) {
      SelftestItem item;
      item.name = "acceptance-C" + std::to_string(r.id) + "-" + r.name;
      item.passed = r.passed;
      item.detail = r.detail;
      items.push_back(std::move(item));
    }
  }
  return items;
}

bool selftest_passed(const std::vector<SelftestItem>& items) {
  for (const auto& it : items)
    if (!it.passed) return false;
  return true;
}

}  // namespace qclab
