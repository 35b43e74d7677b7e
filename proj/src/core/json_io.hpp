#pragma once

#include <json.hpp>

#include "curves.hpp"
#include "shor.hpp"
#include "solvers.hpp"
#include "additivity.hpp"

namespace qclab {

using Json = nlohmann::ordered_json;

// Matrices travel as nested arrays of [re, im] pairs, row-major.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const Json& j);

Json block_operator_to_json(const BlockOperator& b);

// Channel JSON: {"kind": "...", "params": {...}} or the explicit Kraus form
// {"kind": "kraus", "dim_in": n, "dim_out": m, "kraus": [matrix, ...]}.
Json channel_to_json(const ChannelPtr& c);
ChannelPtr channel_from_json(const Json& j);

Json constraint_to_json(const ConstraintSet& set);
ConstraintSet constraint_from_json(const Json& j);

Json solve_report_to_json(const SolveReport& rep);
Json certificate_to_json(const Certificate& cert);
Json gap_report_to_json(const GapReport& rep);
Json prop5_report_to_json(const Prop5Report& rep);

// Seeds are 64-bit unsigned decimal strings; d sizes accept "2^k" notation.
std::uint64_t parse_seed(const Json& j);
std::uint64_t parse_size(const Json& j);

// Finite numbers pass through; infinities become the strings "inf"/"-inf".
Json json_real(double x);

}  // namespace qclab
