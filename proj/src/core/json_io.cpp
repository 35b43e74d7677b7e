#include "json_io.hpp"

#include <charconv>

namespace qclab {

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorKind::parse, "JSON: " + what);
}

double number_of(const Json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace

Json json_real(double x) {
  if (std::isinf(x)) return x > 0 ? Json("inf") : Json("-inf");
  if (std::isnan(x)) return Json("nan");
  return Json(x);
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_fail("matrix must be a nonempty array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      parse_fail("matrix rows have inconsistent lengths");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row.at(static_cast<std::size_t>(k));
      if (e.is_number()) {
        m(i, k) = Cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = Cplx(number_of(e.at(0), "matrix entry"),
                       number_of(e.at(1), "matrix entry"));
      } else {
        parse_fail("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json ensemble_to_json(const Ensemble& e) {
  Json items = Json::array();
  for (const auto& it : e.items())
    items.push_back({{"p", it.p}, {"state", matrix_to_json(it.state.matrix())}});
  return Json{{"items", std::move(items)}};
}

Ensemble ensemble_from_json(const Json& j) {
  if (!j.contains("items")) parse_fail("ensemble needs an items array");
  std::vector<Ensemble::Item> items;
  for (const auto& it : j.at("items"))
    items.push_back({number_of(it.at("p"), "probability"),
                     DensityMatrix(matrix_from_json(it.at("state")))});
  return Ensemble(std::move(items));
}

Json block_operator_to_json(const BlockOperator& b) {
  Json blocks = Json::array();
  for (const auto& blk : b.blocks()) {
    if (const auto* q = std::get_if<QuantumBlock>(&blk))
      blocks.push_back({{"type", "quantum"},
                        {"mult", q->mult},
                        {"op", matrix_to_json(q->op)}});
    else if (const auto* c = std::get_if<ClassicalBlock>(&blk)) {
      Json v = Json::array();
      for (Eigen::Index i = 0; i < c->v.size(); ++i) v.push_back(c->v(i));
      blocks.push_back({{"type", "classical"}, {"v", std::move(v)}});
    } else {
      const auto& u = std::get<UniformClassicalBlock>(blk);
      blocks.push_back({{"type", "uniform_classical"},
                        {"weight", u.weight},
                        {"mult", u.mult}});
    }
  }
  return Json{{"blocks", std::move(blocks)},
              {"trace", b.trace()},
              {"entropy", b.entropy()}};
}

std::uint64_t parse_seed(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      parse_fail("seed must be a 64-bit unsigned decimal string");
    return v;
  }
  parse_fail("seed must be an unsigned integer or decimal string");
}

std::uint64_t parse_size(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.rfind("2^", 0) == 0) {
      int k = 0;
      auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), k);
      if (ec != std::errc() || p != s.data() + s.size() || k < 0 || k > 62)
        parse_fail("bad power-of-two size: " + s);
      return 1ull << k;
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      parse_fail("bad size: " + s);
    return v;
  }
  parse_fail("size must be an unsigned integer, decimal string, or \"2^k\"");
}

namespace {

std::vector<Mat> matrices_from(const Json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array");
  std::vector<Mat> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

Json channel_to_json(const ChannelPtr& c) {
  if (const auto* hat = dynamic_cast<const ShorHatChannel*>(c.get()))
    return Json{{"kind", "shor_hat"},
                {"params",
                 {{"base", channel_to_json(hat->base())},
                  {"E", matrix_to_json(hat->e_op())},
                  {"q", hat->q()},
                  {"d", hat->d()}}}};
  if (const auto* tl = dynamic_cast<const ShorTildeChannel*>(c.get()))
    return Json{{"kind", "shor_tilde"},
                {"params",
                 {{"base", channel_to_json(tl->base())},
                  {"E", matrix_to_json(tl->e_op())},
                  {"q", tl->q()},
                  {"d", tl->d()}}}};
  if (const auto* ds = dynamic_cast<const DirectSumChannel*>(c.get())) {
    Json comps = Json::array();
    for (const auto& comp : ds->components())
      comps.push_back(channel_to_json(comp));
    return Json{{"kind", "direct_sum_mixture"},
                {"params", {{"components", std::move(comps)},
                            {"probs", ds->probs()}}}};
  }
  const auto& k = as_kraus(*c);
  Json ks = Json::array();
  for (const auto& op : k.kraus()) ks.push_back(matrix_to_json(op));
  return Json{{"kind", "kraus"},
              {"dim_in", k.input_dim()},
              {"dim_out", k.output_dim()},
              {"kraus", std::move(ks)}};
}

ChannelPtr channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    parse_fail("channel needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  const Json params = j.value("params", Json::object());
  auto dim_of = [&](const char* key, Eigen::Index fallback) {
    return params.contains(key)
               ? static_cast<Eigen::Index>(parse_size(params.at(key)))
               : fallback;
  };

  if (kind == "identity") return identity_channel(dim_of("dim", 2));
  if (kind == "depolarizing")
    return depolarizing_channel(number_of(params.at("p"), "p"),
                                dim_of("dim", 2));
  if (kind == "dephasing")
    return dephasing_channel(number_of(params.at("p"), "p"), dim_of("dim", 2));
  if (kind == "amplitude_damping")
    return amplitude_damping_channel(number_of(params.at("gamma"), "gamma"));
  if (kind == "cq_measure_prepare")
    return cq_channel(matrices_from(params.at("povm"), "povm"),
                      matrices_from(params.at("outputs"), "outputs"));
  if (kind == "partial_trace_channel") {
    const std::string keep = params.value("keep", "first");
    return partial_trace_channel(
        dim_of("dim_h", 2), dim_of("dim_k", 2),
        keep == "first" ? KeepFactor::first : KeepFactor::second);
  }
  if (kind == "kraus")
    return kraus_channel(matrices_from(j.at("kraus"), "kraus"));
  if (kind == "random")
    return random_channel(dim_of("dim_in", 2), dim_of("dim_out", 2),
                          dim_of("kraus_rank", 2), parse_seed(params.at("seed")));
  if (kind == "random_cq")
    return random_cq_channel(dim_of("dim", 2), dim_of("outcomes", 2),
                             parse_seed(params.at("seed")));
  if (kind == "direct_sum_mixture") {
    std::vector<ChannelPtr> comps;
    for (const auto& c : params.at("components"))
      comps.push_back(channel_from_json(c));
    std::vector<double> probs;
    for (const auto& p : params.at("probs")) probs.push_back(p.get<double>());
    return direct_sum_mixture(std::move(comps), std::move(probs));
  }
  if (kind == "tensor")
    return tensor_channels(channel_from_json(params.at("left")),
                           channel_from_json(params.at("right")));
  if (kind == "shor_hat" || kind == "shor_tilde") {
    auto base = channel_from_json(params.at("base"));
    const Mat e = matrix_from_json(params.at("E"));
    const std::uint64_t d = parse_size(params.at("d"));
    const double q = number_of(params.at("q"), "q");
    if (kind == "shor_hat") return shor_hat(base, e, q, d);
    return shor_tilde(base, e, q, d);
  }
  if (kind == "shor_hat_dp" || kind == "shor_tilde_dp") {
    auto base = channel_from_json(params.at("base"));
    const Mat a = matrix_from_json(params.at("A"));
    const std::uint64_t d = parse_size(params.at("d"));
    const double p = number_of(params.at("p"), "p");
    if (kind == "shor_hat_dp") return shor_hat_dp(base, a, p, d);
    return shor_tilde_dp(base, a, p, d);
  }
  parse_fail("unknown channel kind: " + kind);
}

Json constraint_to_json(const ConstraintSet& set) {
  switch (set.kind()) {
    case ConstraintSet::Kind::full_simplex:
      return Json{{"variant", "full_simplex"}, {"dim", set.dim()}};
    case ConstraintSet::Kind::fixed_state:
      return Json{{"variant", "fixed_state"},
                  {"state", matrix_to_json(set.state().matrix())}};
    case ConstraintSet::Kind::linear: {
      Json terms = Json::array();
      for (const auto& t : set.terms())
        terms.push_back({{"A", matrix_to_json(t.a)}, {"alpha", t.alpha}});
      return Json{{"variant", "linear"},
                  {"dim", set.dim()},
                  {"terms", std::move(terms)}};
    }
  }
  parse_fail("unreachable constraint kind");
}

ConstraintSet constraint_from_json(const Json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "full_simplex")
    return ConstraintSet::full_simplex(
        static_cast<Eigen::Index>(parse_size(j.at("dim"))));
  if (variant == "fixed_state")
    return ConstraintSet::fixed_state(
        DensityMatrix(matrix_from_json(j.at("state"))));
  if (variant == "linear") {
    std::vector<LinearTerm> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({matrix_from_json(t.at("A")),
                       number_of(t.at("alpha"), "alpha")});
    return ConstraintSet::linear(
        static_cast<Eigen::Index>(parse_size(j.at("dim"))), std::move(terms));
  }
  parse_fail("unknown constraint variant: " + variant);
}

Json solve_report_to_json(const SolveReport& rep) {
  Json out{{"value", json_real(rep.value)},
           {"converged", rep.converged},
           {"restarts_used", rep.restarts_used},
           {"gap_estimate", json_real(rep.gap_estimate)},
           {"constraint_residual", json_real(rep.constraint_residual)}};
  if (!std::isnan(rep.convex_closure))
    out["convex_closure"] = json_real(rep.convex_closure);
  if (rep.argmax) out["argmax"] = ensemble_to_json(*rep.argmax);
  if (rep.arg_state)
    out["arg_state"] = matrix_to_json(rep.arg_state->matrix());
  return out;
}

Json certificate_to_json(const Certificate& cert) {
  Json out{{"kind", cert.kind == Certificate::Kind::max_distance
                        ? "max_distance"
                        : "kkt"},
           {"passed", cert.passed},
           {"worst_violation", json_real(cert.worst_violation)},
           {"reference", json_real(cert.reference)},
           {"adversary_value", json_real(cert.adversary_value)}};
  if (!cert.multipliers.empty()) out["multipliers"] = cert.multipliers;
  if (cert.witness) out["witness"] = ensemble_to_json(*cert.witness);
  return out;
}

Json gap_report_to_json(const GapReport& rep) {
  Json out{{"check", rep.check},
           {"lhs", json_real(rep.lhs)},
           {"rhs", json_real(rep.rhs)},
           {"gap", json_real(rep.gap)},
           {"within_bound", rep.within_bound}};
  if (rep.bound) out["bound"] = json_real(*rep.bound);
  if (!rep.note.empty()) out["note"] = rep.note;
  Json terms = Json::object();
  for (const auto& [name, value] : rep.terms) terms[name] = json_real(value);
  out["terms"] = std::move(terms);
  return out;
}

Json prop5_report_to_json(const Prop5Report& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"value", json_real(c.value)},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"note", c.note}});
  return Json{{"equal_support", rep.equal_support},
              {"all_passed", rep.all_passed},
              {"checks", std::move(checks)}};
}

}  // namespace qclab
