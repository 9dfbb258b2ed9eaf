#include "mrr/json_io.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mrr {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

const Json& field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

bool is_uint(const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint32_t u32_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!is_uint(v)) bad(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint32_t>();
}

ServerId server_from_name(const Json& v, const ModelBounds& b) {
    if (!v.is_string()) bad("server id must be a string");
    const std::string name = v.get<std::string>();
    for (size_t i = 0; i < b.servers.size(); ++i) {
        if (b.servers[i] == name) return static_cast<ServerId>(i);
    }
    bad("unknown server id '" + name + "'");
}

Json member_set_to_json(MemberSet m, const ModelBounds& b) {
    Json arr = Json::array();
    m.for_each([&](ServerId s) { arr.push_back(b.servers[s]); });
    return arr;
}

MemberSet member_set_from_json(const Json& j, const ModelBounds& b) {
    if (!j.is_array()) bad("member set must be an array of server ids");
    MemberSet m;
    for (const auto& v : j) m = m.with(server_from_name(v, b));
    return m;
}

}  // namespace

std::string tool_version() { return "mrr 0.1.0"; }

Json bounds_to_json(const ModelBounds& b) {
    Json j;
    j["servers"] = b.servers;
    j["maxTerm"] = b.max_term;
    j["maxLogLen"] = b.max_log_len;
    j["maxConfigVersion"] = b.max_config_version;
    return j;
}

ModelBounds bounds_from_json(const Json& j) {
    ModelBounds b;
    const Json& servers = field(j, "servers");
    if (!servers.is_array() || servers.empty()) bad("bounds.servers must be a non-empty array");
    for (const auto& v : servers) {
        if (!v.is_string()) bad("bounds.servers entries must be strings");
        b.servers.push_back(v.get<std::string>());
    }
    b.max_term = u32_field(j, "maxTerm");
    b.max_log_len = u32_field(j, "maxLogLen");
    b.max_config_version = u32_field(j, "maxConfigVersion");
    b.validate();
    return b;
}

Json state_to_json(const ReplicaSetState& st, const ModelBounds& b) {
    Json j;
    Json servers = Json::array();
    for (int i = 0; i < st.server_count(); ++i) {
        const auto& s = st.servers[i];
        Json e;
        e["id"] = b.servers[i];
        e["log"] = s.log;
        e["term"] = s.term;
        e["role"] = to_string(s.role);
        e["config"] = member_set_to_json(s.config, b);
        e["configVersion"] = s.config_version;
        e["configTerm"] = s.config_term;
        servers.push_back(std::move(e));
    }
    j["servers"] = std::move(servers);
    Json committed = Json::array();
    for (const auto& c : st.committed) committed.push_back(Json::array({c.index, c.term}));
    j["committed"] = std::move(committed);
    return j;
}

ReplicaSetState state_from_json(const Json& j, const ModelBounds& b) {
    ReplicaSetState st;
    st.servers.resize(b.server_count());
    const Json& servers = field(j, "servers");
    if (!servers.is_array() || static_cast<int>(servers.size()) != b.server_count()) {
        bad("state.servers must list every server in the bounds");
    }
    std::vector<bool> seen(b.server_count(), false);
    for (const auto& e : servers) {
        const ServerId id = server_from_name(field(e, "id"), b);
        if (seen[id]) bad("duplicate server '" + b.servers[id] + "' in state");
        seen[id] = true;
        ServerState& s = st.servers[id];
        const Json& log = field(e, "log");
        if (!log.is_array()) bad("log must be an array");
        for (const auto& v : log) {
            if (!is_uint(v)) bad("log entries must be non-negative integers");
            s.log.push_back(v.get<std::uint32_t>());
        }
        s.term = u32_field(e, "term");
        const std::string role = field(e, "role").get<std::string>();
        if (role == "Primary") s.role = Role::Primary;
        else if (role == "Secondary") s.role = Role::Secondary;
        else bad("unknown role '" + role + "'");
        s.config = member_set_from_json(field(e, "config"), b);
        s.config_version = u32_field(e, "configVersion");
        s.config_term = u32_field(e, "configTerm");
    }
    const Json& committed = field(j, "committed");
    if (!committed.is_array()) bad("committed must be an array");
    for (const auto& c : committed) {
        if (!c.is_array() || c.size() != 2 || !is_uint(c[0]) || !is_uint(c[1])) {
            bad("committed entries must be [index, term] pairs");
        }
        st.add_commit({c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>()});
    }
    return st;
}

Json action_to_json(const ActionInstance& a, const ModelBounds& b) {
    Json j;
    j["kind"] = std::string(to_string(a.kind));
    j["s"] = b.servers[a.subject];
    if (a.uses_peer()) j["t"] = b.servers[a.peer];
    if (a.uses_quorum()) j["Q"] = member_set_to_json(a.quorum, b);
    if (a.uses_members()) j["m"] = member_set_to_json(a.members, b);
    return j;
}

ActionInstance action_from_json(const Json& j, const ModelBounds& b) {
    const std::string kind_name = field(j, "kind").get<std::string>();
    const auto kind = action_kind_from_name(kind_name);
    if (!kind) bad("unknown action kind '" + kind_name + "'");
    ActionInstance a;
    a.kind = *kind;
    a.subject = server_from_name(field(j, "s"), b);
    if (a.uses_peer()) a.peer = server_from_name(field(j, "t"), b);
    if (a.uses_quorum()) {
        a.quorum = member_set_from_json(field(j, "Q"), b);
        if (a.quorum.empty()) bad("quorum must be non-empty");
    }
    if (a.uses_members()) {
        a.members = member_set_from_json(field(j, "m"), b);
        if (a.members.empty()) bad("member set must be non-empty");
    }
    return a;
}

namespace {

Json mutations_to_json(const ProtocolOptions& p) {
    Json arr = Json::array();
    if (!p.reconfig_safety_guards) arr.push_back("disable-reconfig-guards");
    return arr;
}

ProtocolOptions mutations_from_json(const Json& j) {
    ProtocolOptions p;
    if (!j.is_array()) bad("mutations must be an array");
    for (const auto& v : j) {
        const std::string name = v.get<std::string>();
        if (name == "disable-reconfig-guards") p.reconfig_safety_guards = false;
        else bad("unknown mutation '" + name + "'");
    }
    return p;
}

}  // namespace

Json trace_to_json(const Trace& t) {
    Json j;
    j["version"] = 1;
    j["toolVersion"] = tool_version();
    j["bounds"] = bounds_to_json(t.bounds);
    j["mutations"] = mutations_to_json(t.protocol);
    if (t.seed) j["seed"] = *t.seed;
    j["init"] = state_to_json(t.init, t.bounds);
    Json steps = Json::array();
    for (const auto& [action, state] : t.steps) {
        Json step;
        step["action"] = action_to_json(action, t.bounds);
        step["state"] = state_to_json(state, t.bounds);
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    return j;
}

Trace trace_from_json(const Json& j) {
    Trace t;
    const std::uint32_t version = u32_field(j, "version");
    if (version != 1) bad("unsupported trace version " + std::to_string(version));
    t.bounds = bounds_from_json(field(j, "bounds"));
    if (j.contains("mutations")) t.protocol = mutations_from_json(j["mutations"]);
    if (j.contains("seed")) {
        if (!is_uint(j["seed"])) bad("seed must be a non-negative integer");
        t.seed = j["seed"].get<std::uint64_t>();
    }
    t.init = state_from_json(field(j, "init"), t.bounds);
    const Json& steps = field(j, "steps");
    if (!steps.is_array()) bad("steps must be an array");
    for (const auto& step : steps) {
        t.steps.emplace_back(action_from_json(field(step, "action"), t.bounds),
                             state_from_json(field(step, "state"), t.bounds));
    }
    return t;
}

namespace {

Json invariant_names_json(const std::vector<InvariantId>& ids) {
    Json arr = Json::array();
    for (InvariantId id : ids) arr.push_back(std::string(invariant_name(id)));
    return arr;
}

Json report_header(const char* command, const Json& run_config) {
    Json j;
    j["version"] = 1;
    j["toolVersion"] = tool_version();
    j["command"] = command;
    j["runConfig"] = run_config;
    return j;
}

}  // namespace

Json check_report_to_json(const CheckReport& r, const Json& run_config) {
    Json j = report_header("check", run_config);
    j["bounds"] = bounds_to_json(r.bounds);
    j["invariants"] = invariant_names_json(r.invariants);
    j["statesVisited"] = r.states_visited;
    j["transitionsExplored"] = r.transitions_explored;
    j["diameter"] = r.diameter;
    j["deadlockStates"] = r.deadlock_states;
    j["stopReason"] = std::string(to_string(r.stop_reason));
    j["complete"] = r.complete;
    j["deterministic"] = r.deterministic;
    j["violationsTotal"] = r.violations_total;
    Json violations = Json::array();
    for (const auto& v : r.violations) {
        Json e;
        e["invariant"] = std::string(invariant_name(v.invariant));
        e["trace"] = trace_to_json(v.trace);
        violations.push_back(std::move(e));
    }
    j["violations"] = std::move(violations);
    j["wallTimeMs"] = r.wall_time_ms;
    return j;
}

Json initiation_report_to_json(const InitiationReport& r, const Json& run_config) {
    Json j = report_header("induction", run_config);
    j["mode"] = "initiation";
    j["bounds"] = bounds_to_json(r.bounds);
    Json conjuncts = Json::array();
    for (const auto& [id, ok] : r.conjuncts) {
        Json e;
        e["conjunct"] = std::string(invariant_name(id));
        e["holds"] = ok;
        conjuncts.push_back(std::move(e));
    }
    j["conjuncts"] = std::move(conjuncts);
    j["allPass"] = r.all_pass;
    j["wallTimeMs"] = r.wall_time_ms;
    return j;
}

Json goal_matrix_to_json(const GoalMatrix& m) {
    Json j;
    Json actions = Json::array();
    for (ActionKind k : all_action_kinds) actions.push_back(std::string(to_string(k)));
    j["actions"] = std::move(actions);
    Json conjuncts = Json::array();
    for (InvariantId id : mrr_ind_conjuncts()) conjuncts.push_back(std::string(invariant_name(id)));
    j["conjuncts"] = std::move(conjuncts);
    Json rows = Json::array();
    for (int r = 0; r < kActionKindCount; ++r) {
        Json row = Json::array();
        for (int c = 0; c < kConjunctCount; ++c) {
            const GoalCell& cell = m.cells[r][c];
            Json e;
            switch (cell.status()) {
                case GoalCell::Status::Pass: e["status"] = "pass"; break;
                case GoalCell::Status::CtiFound: e["status"] = "cti-found"; break;
                case GoalCell::Status::NotExercised: e["status"] = "not-exercised"; break;
            }
            e["checked"] = cell.checked;
            e["ctis"] = cell.ctis;
            row.push_back(std::move(e));
        }
        rows.push_back(std::move(row));
    }
    j["cells"] = std::move(rows);
    return j;
}

std::string goal_matrix_to_text(const GoalMatrix& m) {
    std::ostringstream out;
    out << "goal matrix: rows = actions, columns = conjuncts "
           "(. pass, X cti, - not exercised)\n";
    const auto conjuncts = mrr_ind_conjuncts();
    for (int c = 0; c < kConjunctCount; ++c) {
        out << "  c" << (c + 1) << (c + 1 < 10 ? "  = " : " = ") << invariant_name(conjuncts[c]) << "\n";
    }
    for (int r = 0; r < kActionKindCount; ++r) {
        std::string name(to_string(all_action_kinds[r]));
        name.resize(16, ' ');
        out << "  " << name;
        for (int c = 0; c < kConjunctCount; ++c) {
            switch (m.cells[r][c].status()) {
                case GoalCell::Status::Pass: out << '.'; break;
                case GoalCell::Status::CtiFound: out << 'X'; break;
                case GoalCell::Status::NotExercised: out << '-'; break;
            }
        }
        out << "\n";
    }
    return out.str();
}

Json consecution_report_to_json(const ConsecutionReport& r, const Json& run_config) {
    Json j = report_header("induction", run_config);
    j["mode"] = r.exhaustive ? "exhaustive" : "sample";
    j["bounds"] = bounds_to_json(r.bounds);
    j["samplesDrawn"] = r.samples_drawn;
    j["samplesAccepted"] = r.samples_accepted;
    j["samplesDiscarded"] = r.samples_drawn - r.samples_accepted;
    j["statesEnumerated"] = r.states_enumerated;
    j["transitionsChecked"] = r.transitions_checked;
    j["matrix"] = goal_matrix_to_json(r.matrix);
    j["ctisTotal"] = r.ctis_total;
    Json ctis = Json::array();
    for (const auto& rec : r.ctis) {
        Json e;
        Json goal;
        goal["action"] = std::string(to_string(rec.action.kind));
        goal["conjunct"] = std::string(invariant_name(rec.violated));
        e["goal"] = std::move(goal);
        e["violated"] = std::string(invariant_name(rec.violated));
        e["pre"] = state_to_json(rec.pre, r.bounds);
        e["action"] = action_to_json(rec.action, r.bounds);
        e["post"] = state_to_json(rec.post, r.bounds);
        ctis.push_back(std::move(e));
    }
    j["ctis"] = std::move(ctis);
    j["wallTimeMs"] = r.wall_time_ms;
    return j;
}

std::string to_bytes(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mrr
