#include "mrr/actions.hpp"

#include <stdexcept>

#include "mrr/quorum.hpp"

namespace mrr {

std::string_view to_string(ActionKind k) {
    switch (k) {
        case ActionKind::ClientRequest: return "ClientRequest";
        case ActionKind::GetEntries: return "GetEntries";
        case ActionKind::RollbackEntries: return "RollbackEntries";
        case ActionKind::CommitEntry: return "CommitEntry";
        case ActionKind::SendConfig: return "SendConfig";
        case ActionKind::Reconfig: return "Reconfig";
        case ActionKind::BecomeLeader: return "BecomeLeader";
        case ActionKind::UpdateTerms: return "UpdateTerms";
    }
    return "?";
}

std::optional<ActionKind> action_kind_from_name(std::string_view name) {
    for (ActionKind k : all_action_kinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

namespace {

void require_server(const ReplicaSetState& st, ServerId s) {
    if (s >= st.server_count()) throw std::invalid_argument("server id out of range");
}

void require_member_set(const ReplicaSetState& st, MemberSet m) {
    if (!m.subset_of(MemberSet::full(st.server_count()))) {
        throw std::invalid_argument("member set outside the server universe");
    }
}

bool is_majority_of(MemberSet q, MemberSet members) {
    return !q.empty() && q.subset_of(members) && 2 * q.size() > members.size();
}

// log[s] is a (possibly equal) prefix of log[t].
bool log_is_prefix_of(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

std::optional<ReplicaSetState> client_request(const ReplicaSetState& st, ServerId s) {
    require_server(st, s);
    if (st.servers[s].role != Role::Primary) return std::nullopt;
    ReplicaSetState next = st;
    next.servers[s].log.push_back(st.servers[s].term);
    return next;
}

std::optional<ReplicaSetState> get_entries(const ReplicaSetState& st, ServerId s, ServerId t) {
    require_server(st, s);
    require_server(st, t);
    if (s == t) return std::nullopt;
    // Pull replication: only a secondary fetches, and only when its log is a
    // strict prefix-compatible predecessor of the source's.
    if (st.servers[s].role != Role::Secondary) return std::nullopt;
    const auto& dst = st.servers[s].log;
    const auto& src = st.servers[t].log;
    if (src.size() <= dst.size()) return std::nullopt;
    if (!dst.empty() && dst.back() != src[dst.size() - 1]) return std::nullopt;
    ReplicaSetState next = st;
    next.servers[s].log.push_back(src[dst.size()]);
    return next;
}

std::optional<ReplicaSetState> rollback_entries(const ReplicaSetState& st, ServerId s, ServerId t) {
    require_server(st, s);
    require_server(st, t);
    if (s == t) return std::nullopt;
    if (st.servers[s].role != Role::Secondary) return std::nullopt;
    const auto& own = st.servers[s].log;
    const auto& other = st.servers[t].log;
    if (own.empty()) return std::nullopt;
    if (last_term(own) >= last_term(other)) return std::nullopt;
    // Only divergent suffixes are rolled back; a log that is a prefix of the
    // newer one catches up through GetEntries instead. Without this check a
    // committed prefix could be erased.
    if (log_is_prefix_of(own, other)) return std::nullopt;
    ReplicaSetState next = st;
    next.servers[s].log.pop_back();
    return next;
}

std::optional<ReplicaSetState> commit_entry(const ReplicaSetState& st, ServerId s, MemberSet quorum) {
    require_server(st, s);
    require_member_set(st, quorum);
    const auto& me = st.servers[s];
    if (me.role != Role::Primary) return std::nullopt;
    if (!is_majority_of(quorum, me.config)) return std::nullopt;
    const std::uint32_t ind = static_cast<std::uint32_t>(me.log.size());
    if (ind < 1) return std::nullopt;
    if (me.log.back() != me.term) return std::nullopt;
    // The entry must be immediately committed: every quorum member stores it
    // and is still in the entry's term.
    bool ok = true;
    quorum.for_each([&](ServerId n) {
        const auto& other = st.servers[n];
        if (other.log.size() < ind || other.log[ind - 1] != me.term || other.term != me.term) ok = false;
    });
    if (!ok) return std::nullopt;
    const CommitRecord rec{ind, me.term};
    if (st.has_commit(rec)) return std::nullopt;
    ReplicaSetState next = st;
    next.add_commit(rec);
    return next;
}

std::optional<ReplicaSetState> send_config(const ReplicaSetState& st, ServerId s, ServerId t) {
    require_server(st, s);
    require_server(st, t);
    if (s == t) return std::nullopt;
    if (st.servers[t].role != Role::Secondary) return std::nullopt;
    if (!is_newer_config(st.servers[s].stamp(), st.servers[t].stamp())) return std::nullopt;
    ReplicaSetState next = st;
    next.servers[t].config = st.servers[s].config;
    next.servers[t].config_version = st.servers[s].config_version;
    next.servers[t].config_term = st.servers[s].config_term;
    return next;
}

std::optional<ReplicaSetState> reconfig(const ReplicaSetState& st, ServerId s, MemberSet new_members,
                                        const ProtocolOptions& opts) {
    require_server(st, s);
    require_member_set(st, new_members);
    const auto& me = st.servers[s];
    if (me.role != Role::Primary) return std::nullopt;
    if (new_members.empty()) return std::nullopt;
    if (!new_members.contains(s)) return std::nullopt;
    if (new_members == me.config) return std::nullopt;

    if (opts.reconfig_safety_guards) {
        // The new member set must share quorums with the old one, so that two
        // simultaneously active configs can never elect independently.
        if (!quorums_overlap(me.config, new_members)) return std::nullopt;
        const auto quorums = majority_quorums_or_none(me.config);
        const auto satisfied = [&](auto&& pred) {
            for (MemberSet q : quorums) {
                bool all = true;
                q.for_each([&](ServerId n) {
                    if (!pred(st.servers[n], n)) all = false;
                });
                if (all) return true;
            }
            return false;
        };
        // Current config replicated to a quorum.
        if (!satisfied([&](const ServerState& o, ServerId) { return o.stamp() == me.stamp(); })) {
            return std::nullopt;
        }
        // Current term replicated to a quorum. Members that moved past the
        // primary's term disqualify their quorums: the primary is already
        // being superseded and must not fork the config history.
        if (!satisfied([&](const ServerState& o, ServerId) { return o.term == me.term; })) {
            return std::nullopt;
        }
        // Every committed entry durable on a quorum of the current config.
        if (!satisfied([&](const ServerState&, ServerId n) {
                for (const auto& c : st.committed) {
                    if (!in_log(c.index, c.term, st, n)) return false;
                }
                return true;
            })) {
            return std::nullopt;
        }
    }

    ReplicaSetState next = st;
    next.servers[s].config = new_members;
    next.servers[s].config_version = me.config_version + 1;
    next.servers[s].config_term = me.term;
    return next;
}

std::optional<ReplicaSetState> become_leader(const ReplicaSetState& st, ServerId s, MemberSet quorum) {
    require_server(st, s);
    require_member_set(st, quorum);
    const auto& me = st.servers[s];
    if (!quorum.contains(s)) return std::nullopt;
    if (!is_majority_of(quorum, me.config)) return std::nullopt;
    // The log and config ballots run as one election, so the candidate's
    // config term must have caught up with its own term; a server that has
    // installed a config from a newer term first learns that term.
    if (me.config_term != me.term) return std::nullopt;
    const std::uint32_t new_term = me.term + 1;
    bool ok = true;
    quorum.for_each([&](ServerId v) {
        const auto& voter = st.servers[v];
        if (voter.term >= new_term) ok = false;
        if (!is_newer_or_equal_config(me.stamp(), voter.stamp())) ok = false;
        const std::uint32_t lt_me = last_term(me.log);
        const std::uint32_t lt_voter = last_term(voter.log);
        if (!(lt_me > lt_voter || (lt_me == lt_voter && me.log.size() >= voter.log.size()))) ok = false;
    });
    if (!ok) return std::nullopt;
    ReplicaSetState next = st;
    quorum.for_each([&](ServerId v) {
        next.servers[v].term = new_term;
        next.servers[v].role = v == s ? Role::Primary : Role::Secondary;
    });
    next.servers[s].config_term = new_term;
    return next;
}

std::optional<ReplicaSetState> update_terms(const ReplicaSetState& st, ServerId s, ServerId t) {
    require_server(st, s);
    require_server(st, t);
    if (s == t) return std::nullopt;
    if (st.servers[s].term <= st.servers[t].term) return std::nullopt;
    ReplicaSetState next = st;
    next.servers[t].term = st.servers[s].term;
    next.servers[t].role = Role::Secondary;
    return next;
}

std::optional<ReplicaSetState> apply_action(const ReplicaSetState& st, const ActionInstance& a,
                                            const ProtocolOptions& opts) {
    switch (a.kind) {
        case ActionKind::ClientRequest: return client_request(st, a.subject);
        case ActionKind::GetEntries: return get_entries(st, a.subject, a.peer);
        case ActionKind::RollbackEntries: return rollback_entries(st, a.subject, a.peer);
        case ActionKind::CommitEntry: return commit_entry(st, a.subject, a.quorum);
        case ActionKind::SendConfig: return send_config(st, a.subject, a.peer);
        case ActionKind::Reconfig: return reconfig(st, a.subject, a.members, opts);
        case ActionKind::BecomeLeader: return become_leader(st, a.subject, a.quorum);
        case ActionKind::UpdateTerms: return update_terms(st, a.subject, a.peer);
    }
    throw std::invalid_argument("unknown action kind");
}

std::vector<std::pair<ActionInstance, ReplicaSetState>> enumerate_transitions(
    const ReplicaSetState& st, const ModelBounds& bounds, const ProtocolOptions& opts) {
    if (!type_ok(st, bounds)) throw std::invalid_argument("state violates TypeOK for these bounds");

    std::vector<std::pair<ActionInstance, ReplicaSetState>> out;
    const int n = st.server_count();
    const auto subsets = nonempty_subsets(bounds.universe());

    auto try_add = [&](const ActionInstance& a) {
        if (auto next = apply_action(st, a, opts)) {
            out.emplace_back(a, std::move(*next));
        }
    };

    for (ActionKind kind : all_action_kinds) {
        for (ServerId s = 0; s < n; ++s) {
            switch (kind) {
                case ActionKind::ClientRequest:
                    if (st.servers[s].log.size() >= bounds.max_log_len) break;
                    try_add(ActionInstance::client_request(s));
                    break;
                case ActionKind::GetEntries:
                case ActionKind::RollbackEntries:
                case ActionKind::SendConfig:
                case ActionKind::UpdateTerms:
                    for (ServerId t = 0; t < n; ++t) {
                        if (t == s) continue;
                        if (kind == ActionKind::GetEntries) try_add(ActionInstance::get_entries(s, t));
                        else if (kind == ActionKind::RollbackEntries) try_add(ActionInstance::rollback_entries(s, t));
                        else if (kind == ActionKind::SendConfig) try_add(ActionInstance::send_config(s, t));
                        else try_add(ActionInstance::update_terms(s, t));
                    }
                    break;
                case ActionKind::CommitEntry:
                    for (MemberSet q : majority_quorums_or_none(st.servers[s].config)) {
                        try_add(ActionInstance::commit_entry(s, q));
                    }
                    break;
                case ActionKind::Reconfig:
                    if (st.servers[s].config_version + 1 > bounds.max_config_version) break;
                    for (MemberSet m : subsets) {
                        try_add(ActionInstance::reconfig(s, m));
                    }
                    break;
                case ActionKind::BecomeLeader:
                    if (st.servers[s].term + 1 > bounds.max_term) break;
                    for (MemberSet q : majority_quorums_or_none(st.servers[s].config)) {
                        try_add(ActionInstance::become_leader(s, q));
                    }
                    break;
            }
        }
    }
    return out;
}

}  // namespace mrr
