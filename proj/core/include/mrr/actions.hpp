#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mrr/state.hpp"

namespace mrr {

// The eight protocol actions, in next-state-relation order. This order is
// also the row order of the induction goal matrix.
enum class ActionKind : std::uint8_t {
    ClientRequest = 0,
    GetEntries,
    RollbackEntries,
    CommitEntry,
    SendConfig,
    Reconfig,
    BecomeLeader,
    UpdateTerms,
};

inline constexpr int kActionKindCount = 8;

inline constexpr std::array<ActionKind, kActionKindCount> all_action_kinds = {
    ActionKind::ClientRequest,  ActionKind::GetEntries, ActionKind::RollbackEntries,
    ActionKind::CommitEntry,    ActionKind::SendConfig, ActionKind::Reconfig,
    ActionKind::BecomeLeader,   ActionKind::UpdateTerms,
};

std::string_view to_string(ActionKind k);
std::optional<ActionKind> action_kind_from_name(std::string_view name);

// One parametrized action. `subject` is always present; the other arguments
// are meaningful only for the kinds that take them and stay zeroed otherwise,
// so tuple comparison doubles as the canonical (kind, args) order.
struct ActionInstance {
    ActionKind kind = ActionKind::ClientRequest;
    ServerId subject = 0;
    ServerId peer = 0;
    MemberSet quorum;   // CommitEntry, BecomeLeader
    MemberSet members;  // Reconfig

    static ActionInstance client_request(ServerId s) { return {ActionKind::ClientRequest, s, 0, {}, {}}; }
    static ActionInstance get_entries(ServerId s, ServerId t) { return {ActionKind::GetEntries, s, t, {}, {}}; }
    static ActionInstance rollback_entries(ServerId s, ServerId t) { return {ActionKind::RollbackEntries, s, t, {}, {}}; }
    static ActionInstance commit_entry(ServerId s, MemberSet q) { return {ActionKind::CommitEntry, s, 0, q, {}}; }
    static ActionInstance send_config(ServerId s, ServerId t) { return {ActionKind::SendConfig, s, t, {}, {}}; }
    static ActionInstance reconfig(ServerId s, MemberSet m) { return {ActionKind::Reconfig, s, 0, {}, m}; }
    static ActionInstance become_leader(ServerId s, MemberSet q) { return {ActionKind::BecomeLeader, s, 0, q, {}}; }
    static ActionInstance update_terms(ServerId s, ServerId t) { return {ActionKind::UpdateTerms, s, t, {}, {}}; }

    bool uses_peer() const { return kind == ActionKind::GetEntries || kind == ActionKind::RollbackEntries || kind == ActionKind::SendConfig || kind == ActionKind::UpdateTerms; }
    bool uses_quorum() const { return kind == ActionKind::CommitEntry || kind == ActionKind::BecomeLeader; }
    bool uses_members() const { return kind == ActionKind::Reconfig; }

    auto key() const { return std::tuple(kind, subject, peer, quorum.mask(), members.mask()); }
    friend bool operator==(const ActionInstance& a, const ActionInstance& b) { return a.key() == b.key(); }
    friend bool operator<(const ActionInstance& a, const ActionInstance& b) { return a.key() < b.key(); }
};

// Mutation switches, exposed through the CLI so broken-protocol runs are
// reproducible. With reconfig_safety_guards off, Reconfig keeps only its
// structural preconditions (primary, s in m, m != config, m non-empty).
struct ProtocolOptions {
    bool reconfig_safety_guards = true;

    friend bool operator==(const ProtocolOptions&, const ProtocolOptions&) = default;
};

// Guards and effects. Each returns the successor state when the action is
// enabled and std::nullopt otherwise. Out-of-range server ids or member sets
// are malformed input and throw std::invalid_argument instead.
std::optional<ReplicaSetState> client_request(const ReplicaSetState& st, ServerId s);
std::optional<ReplicaSetState> get_entries(const ReplicaSetState& st, ServerId s, ServerId t);
std::optional<ReplicaSetState> rollback_entries(const ReplicaSetState& st, ServerId s, ServerId t);
std::optional<ReplicaSetState> commit_entry(const ReplicaSetState& st, ServerId s, MemberSet quorum);
std::optional<ReplicaSetState> send_config(const ReplicaSetState& st, ServerId s, ServerId t);
std::optional<ReplicaSetState> reconfig(const ReplicaSetState& st, ServerId s, MemberSet new_members,
                                        const ProtocolOptions& opts = {});
std::optional<ReplicaSetState> become_leader(const ReplicaSetState& st, ServerId s, MemberSet quorum);
std::optional<ReplicaSetState> update_terms(const ReplicaSetState& st, ServerId s, ServerId t);

std::optional<ReplicaSetState> apply_action(const ReplicaSetState& st, const ActionInstance& a,
                                            const ProtocolOptions& opts = {});

// Every enabled action instance from st paired with its successor, in
// canonical (kind, args) order. Applies the finite-scope pruning: elections
// past max_term, writes past max_log_len and reconfigs past
// max_config_version are not generated. Requires type_ok(st, bounds).
std::vector<std::pair<ActionInstance, ReplicaSetState>> enumerate_transitions(
    const ReplicaSetState& st, const ModelBounds& bounds, const ProtocolOptions& opts = {});

}  // namespace mrr
