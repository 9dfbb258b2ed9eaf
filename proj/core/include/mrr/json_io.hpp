#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "mrr/explore.hpp"
#include "mrr/induction.hpp"

namespace mrr {

// All artifacts serialize to JSON with a fixed key order, server maps as
// arrays sorted by server id, sets as sorted arrays and integers only, so a
// given value always produces the same bytes. Parsers normalize (committed
// re-sorted, ids resolved) and reject malformed input with a message naming
// the offending token.

using Json = nlohmann::ordered_json;

Json bounds_to_json(const ModelBounds& b);
ModelBounds bounds_from_json(const Json& j);

Json state_to_json(const ReplicaSetState& st, const ModelBounds& b);
ReplicaSetState state_from_json(const Json& j, const ModelBounds& b);

Json action_to_json(const ActionInstance& a, const ModelBounds& b);
ActionInstance action_from_json(const Json& j, const ModelBounds& b);

Json trace_to_json(const Trace& t);
Trace trace_from_json(const Json& j);

Json check_report_to_json(const CheckReport& r, const Json& run_config);
Json initiation_report_to_json(const InitiationReport& r, const Json& run_config);
Json consecution_report_to_json(const ConsecutionReport& r, const Json& run_config);

// 8 x 20 matrix block shared by induction reports.
Json goal_matrix_to_json(const GoalMatrix& m);
// Fixed-width text rendering, one row per action.
std::string goal_matrix_to_text(const GoalMatrix& m);

// dump(2) plus trailing newline; the one dump routine everything uses.
std::string to_bytes(const Json& j);

std::string tool_version();

}  // namespace mrr
