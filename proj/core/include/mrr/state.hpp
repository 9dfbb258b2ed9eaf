#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mrr/types.hpp"

namespace mrr {

// The (version, term) pair identifying a configuration. Stamps are totally
// ordered with the term compared first.
struct ConfigStamp {
    std::uint32_t version = 0;
    std::uint32_t term = 0;

    friend constexpr bool operator==(const ConfigStamp&, const ConfigStamp&) = default;
};

constexpr bool is_newer_config(ConfigStamp a, ConfigStamp b) {
    return a.term > b.term || (a.term == b.term && a.version > b.version);
}

constexpr bool is_newer_or_equal_config(ConfigStamp a, ConfigStamp b) {
    return a == b || is_newer_config(a, b);
}

// A committed log entry, identified by (index, term). Indexes are 1-based;
// index 0 never arises from the protocol but stays representable so that the
// CommittedEntryIndexesAreNonZero predicate has something to reject.
struct CommitRecord {
    std::uint32_t index = 0;
    std::uint32_t term = 0;

    friend constexpr auto operator<=>(const CommitRecord&, const CommitRecord&) = default;
};

// Finite-scope parameters: the fixed server set plus caps on terms, log
// length and config versions. All state enumeration is relative to these.
struct ModelBounds {
    std::vector<std::string> servers;
    std::uint32_t max_term = 1;
    std::uint32_t max_log_len = 1;
    std::uint32_t max_config_version = 1;

    int server_count() const { return static_cast<int>(servers.size()); }
    MemberSet universe() const { return MemberSet::full(server_count()); }

    // Default naming scheme n1..nN.
    static ModelBounds make(int server_count, std::uint32_t max_term,
                            std::uint32_t max_log_len, std::uint32_t max_config_version);

    // Throws std::invalid_argument on an unusable scope.
    void validate() const;

    friend bool operator==(const ModelBounds&, const ModelBounds&) = default;
};

struct ServerState {
    std::vector<std::uint32_t> log;  // element = term of the entry; 1-indexed in the protocol
    std::uint32_t term = 0;
    Role role = Role::Secondary;
    MemberSet config;
    std::uint32_t config_version = 0;
    std::uint32_t config_term = 0;

    ConfigStamp stamp() const { return {config_version, config_term}; }

    friend bool operator==(const ServerState&, const ServerState&) = default;
};

struct ReplicaSetState {
    std::vector<ServerState> servers;
    std::vector<CommitRecord> committed;  // kept sorted and unique

    int server_count() const { return static_cast<int>(servers.size()); }

    bool has_commit(CommitRecord r) const {
        return std::binary_search(committed.begin(), committed.end(), r);
    }
    void add_commit(CommitRecord r) {
        auto it = std::lower_bound(committed.begin(), committed.end(), r);
        if (it == committed.end() || *it != r) committed.insert(it, r);
    }

    friend bool operator==(const ReplicaSetState&, const ReplicaSetState&) = default;
};

// Term of the last log entry, 0 for an empty log.
inline std::uint32_t last_term(const std::vector<std::uint32_t>& log) {
    return log.empty() ? 0 : log.back();
}

// Whether server s holds the entry (index, term). Indexes are 1-based.
inline bool in_log(std::uint32_t index, std::uint32_t term, const ReplicaSetState& st, ServerId s) {
    const auto& log = st.servers[s].log;
    return index >= 1 && index <= log.size() && log[index - 1] == term;
}

// Uniform bootstrap state: everyone secondary at term 0 with the full member
// set at stamp (1, 0), empty logs, nothing committed. A non-empty
// initial_config replaces the member set on every server (experiments with
// partial bootstrap membership).
ReplicaSetState initial_state(const ModelBounds& bounds, MemberSet initial_config = MemberSet());

// Bounded type correctness: map shapes plus numeric caps. Committed records
// are capped at (max_log_len, max_term); member sets must fit the universe.
bool type_ok(const ReplicaSetState& st, const ModelBounds& bounds);

}  // namespace mrr
