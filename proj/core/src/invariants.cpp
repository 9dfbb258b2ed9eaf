#include "mrr/invariants.hpp"

#include <stdexcept>

#include "mrr/quorum.hpp"

namespace mrr {

namespace {

constexpr std::array<InvariantId, kConjunctCount> kConjuncts = {
    InvariantId::TypeOK,
    InvariantId::ElectionSafety,
    InvariantId::PrimaryConfigTermEqualToCurrentTerm,
    InvariantId::ConfigVersionAndTermUnique,
    InvariantId::PrimaryInTermContainsNewestConfigOfTerm,
    InvariantId::ActiveConfigsOverlap,
    InvariantId::ActiveConfigsSafeAtTerms,
    InvariantId::LogEntryInTermImpliesConfigInTerm,
    InvariantId::PrimaryHasEntriesItCreated,
    InvariantId::LogMatching,
    InvariantId::PrimaryTermAtLeastAsLargeAsLogTerms,
    InvariantId::TermsOfEntriesGrowMonotonically,
    InvariantId::UniformLogEntriesInTerm,
    InvariantId::CommittedEntryIndexesAreNonZero,
    InvariantId::CommittedTermMatchesEntry,
    InvariantId::LeaderCompleteness,
    InvariantId::LogsLaterThanCommittedMustHaveCommitted,
    InvariantId::ActiveConfigsOverlapWithCommittedEntry,
    InvariantId::NewerConfigsDisableCommitsInOlderTerm,
    InvariantId::ConfigsNonEmpty,
};

constexpr std::array<InvariantId, kInvariantCount> kAllIds = {
    InvariantId::TypeOK,
    InvariantId::ElectionSafety,
    InvariantId::PrimaryConfigTermEqualToCurrentTerm,
    InvariantId::ConfigVersionAndTermUnique,
    InvariantId::PrimaryInTermContainsNewestConfigOfTerm,
    InvariantId::ActiveConfigsOverlap,
    InvariantId::ActiveConfigsSafeAtTerms,
    InvariantId::LogEntryInTermImpliesConfigInTerm,
    InvariantId::PrimaryHasEntriesItCreated,
    InvariantId::LogMatching,
    InvariantId::PrimaryTermAtLeastAsLargeAsLogTerms,
    InvariantId::TermsOfEntriesGrowMonotonically,
    InvariantId::UniformLogEntriesInTerm,
    InvariantId::CommittedEntryIndexesAreNonZero,
    InvariantId::CommittedTermMatchesEntry,
    InvariantId::LeaderCompleteness,
    InvariantId::LogsLaterThanCommittedMustHaveCommitted,
    InvariantId::ActiveConfigsOverlapWithCommittedEntry,
    InvariantId::NewerConfigsDisableCommitsInOlderTerm,
    InvariantId::ConfigsNonEmpty,
    InvariantId::StateMachineSafety,
    InvariantId::MRRInd,
};

std::uint32_t max_config_term(const ReplicaSetState& st) {
    std::uint32_t m = 0;
    for (const auto& s : st.servers) m = std::max(m, s.config_term);
    return m;
}

bool election_safety(const ReplicaSetState& st) {
    const int n = st.server_count();
    for (int i = 0; i < n; ++i) {
        if (st.servers[i].role != Role::Primary) continue;
        for (int j = i + 1; j < n; ++j) {
            if (st.servers[j].role == Role::Primary && st.servers[i].term == st.servers[j].term) {
                return false;
            }
        }
    }
    return true;
}

bool primary_config_term_equal(const ReplicaSetState& st) {
    for (const auto& s : st.servers) {
        if (s.role == Role::Primary && s.config_term != s.term) return false;
    }
    return true;
}

bool config_version_and_term_unique(const ReplicaSetState& st) {
    const int n = st.server_count();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (st.servers[i].stamp() == st.servers[j].stamp() &&
                st.servers[i].config != st.servers[j].config) {
                return false;
            }
        }
    }
    return true;
}

bool primary_in_term_has_newest_config(const ReplicaSetState& st) {
    for (const auto& p : st.servers) {
        if (p.role != Role::Primary) continue;
        for (const auto& o : st.servers) {
            if (o.config_term == p.term && o.config_version > p.config_version) return false;
        }
    }
    return true;
}

bool active_configs_overlap(const ReplicaSetState& st) {
    const MemberSet active = active_config_set(st);
    bool ok = true;
    active.for_each([&](ServerId i) {
        active.for_each([&](ServerId j) {
            if (i < j && !quorums_overlap(st.servers[i].config, st.servers[j].config)) ok = false;
        });
    });
    return ok;
}

// Every quorum of every active config carries a member whose current term is
// at least every config term present in the system. This is what makes an
// election at term T impossible while artifacts of a term > T exist: the
// candidate's config is active, so each of its quorums contains a server
// that refuses to vote below the newest config term.
bool active_configs_safe_at_terms(const ReplicaSetState& st) {
    const std::uint32_t newest = max_config_term(st);
    const MemberSet active = active_config_set(st);
    bool ok = true;
    active.for_each([&](ServerId s) {
        for (MemberSet q : majority_quorums_or_none(st.servers[s].config)) {
            bool found = false;
            q.for_each([&](ServerId n) {
                if (st.servers[n].term >= newest) found = true;
            });
            if (!found) ok = false;
        }
    });
    return ok;
}

bool log_entry_term_has_config_term(const ReplicaSetState& st) {
    const std::uint32_t newest = max_config_term(st);
    for (const auto& s : st.servers) {
        for (std::uint32_t e : s.log) {
            if (e > newest) return false;
        }
    }
    return true;
}

bool primary_has_entries_it_created(const ReplicaSetState& st) {
    const int n = st.server_count();
    for (int p = 0; p < n; ++p) {
        if (st.servers[p].role != Role::Primary) continue;
        const std::uint32_t pterm = st.servers[p].term;
        for (int x = 0; x < n; ++x) {
            const auto& log = st.servers[x].log;
            for (std::uint32_t i = 0; i < log.size(); ++i) {
                if (log[i] == pterm && !in_log(i + 1, pterm, st, static_cast<ServerId>(p))) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool log_matching(const ReplicaSetState& st) {
    const int n = st.server_count();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = st.servers[i].log;
            const auto& b = st.servers[j].log;
            const size_t common = std::min(a.size(), b.size());
            // Matching at the deepest agreeing index forces the whole prefix.
            size_t top = 0;
            for (size_t k = common; k >= 1; --k) {
                if (a[k - 1] == b[k - 1]) {
                    top = k;
                    break;
                }
            }
            for (size_t k = 0; k < top; ++k) {
                if (a[k] != b[k]) return false;
            }
        }
    }
    return true;
}

bool primary_term_at_least_log_terms(const ReplicaSetState& st) {
    for (const auto& s : st.servers) {
        if (s.role != Role::Primary) continue;
        for (std::uint32_t e : s.log) {
            if (e > s.term) return false;
        }
    }
    return true;
}

bool terms_grow_monotonically(const ReplicaSetState& st) {
    for (const auto& s : st.servers) {
        for (size_t i = 1; i < s.log.size(); ++i) {
            if (s.log[i - 1] > s.log[i]) return false;
        }
    }
    return true;
}

bool uniform_log_entries_in_term(const ReplicaSetState& st) {
    const int n = st.server_count();
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            const auto& a = st.servers[s].log;
            const auto& b = st.servers[t].log;
            for (size_t i = 0; i < a.size(); ++i) {
                for (size_t j = i; j < b.size(); ++j) {
                    if (a[i] == b[j] && b[i] != a[i]) return false;
                }
            }
        }
    }
    return true;
}

bool committed_indexes_nonzero(const ReplicaSetState& st) {
    for (const auto& c : st.committed) {
        if (c.index < 1) return false;
    }
    return true;
}

bool committed_term_matches_entry(const ReplicaSetState& st) {
    for (const auto& c : st.committed) {
        bool found = false;
        for (int s = 0; s < st.server_count() && !found; ++s) {
            found = in_log(c.index, c.term, st, static_cast<ServerId>(s));
        }
        if (!found) return false;
    }
    return true;
}

bool leader_completeness(const ReplicaSetState& st) {
    for (int p = 0; p < st.server_count(); ++p) {
        if (st.servers[p].role != Role::Primary) continue;
        for (const auto& c : st.committed) {
            if (c.term < st.servers[p].term && !in_log(c.index, c.term, st, static_cast<ServerId>(p))) {
                return false;
            }
        }
    }
    return true;
}

bool logs_later_than_committed_have_committed(const ReplicaSetState& st) {
    for (int s = 0; s < st.server_count(); ++s) {
        const auto& log = st.servers[s].log;
        for (const auto& c : st.committed) {
            bool later = false;
            for (std::uint32_t e : log) {
                if (e > c.term) later = true;
            }
            if (later && !(log.size() >= c.index && in_log(c.index, c.term, st, static_cast<ServerId>(s)))) {
                return false;
            }
        }
    }
    return true;
}

bool active_configs_overlap_with_committed(const ReplicaSetState& st) {
    if (st.committed.empty()) return true;
    const MemberSet active = active_config_set(st);
    bool ok = true;
    active.for_each([&](ServerId s) {
        for (MemberSet q : majority_quorums_or_none(st.servers[s].config)) {
            for (const auto& c : st.committed) {
                bool found = false;
                q.for_each([&](ServerId n) {
                    if (in_log(c.index, c.term, st, n)) found = true;
                });
                if (!found) ok = false;
            }
        }
    });
    return ok;
}

bool newer_configs_disable_older_commits(const ReplicaSetState& st) {
    for (const auto& p : st.servers) {
        if (p.role != Role::Primary) continue;
        bool newer_exists = false;
        for (const auto& o : st.servers) {
            if (o.config_term > p.term) newer_exists = true;
        }
        if (!newer_exists) continue;
        for (MemberSet q : majority_quorums_or_none(p.config)) {
            bool found = false;
            q.for_each([&](ServerId n) {
                if (st.servers[n].term > p.term) found = true;
            });
            if (!found) return false;
        }
    }
    return true;
}

bool configs_non_empty(const ReplicaSetState& st) {
    for (const auto& s : st.servers) {
        if (s.config.empty()) return false;
    }
    return true;
}

bool state_machine_safety(const ReplicaSetState& st) {
    // committed is sorted by (index, term), so equal indexes are adjacent.
    for (size_t i = 1; i < st.committed.size(); ++i) {
        if (st.committed[i - 1].index == st.committed[i].index &&
            st.committed[i - 1].term != st.committed[i].term) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string_view invariant_name(InvariantId id) {
    switch (id) {
        case InvariantId::TypeOK: return "TypeOK";
        case InvariantId::ElectionSafety: return "ElectionSafety";
        case InvariantId::PrimaryConfigTermEqualToCurrentTerm: return "PrimaryConfigTermEqualToCurrentTerm";
        case InvariantId::ConfigVersionAndTermUnique: return "ConfigVersionAndTermUnique";
        case InvariantId::PrimaryInTermContainsNewestConfigOfTerm: return "PrimaryInTermContainsNewestConfigOfTerm";
        case InvariantId::ActiveConfigsOverlap: return "ActiveConfigsOverlap";
        case InvariantId::ActiveConfigsSafeAtTerms: return "ActiveConfigsSafeAtTerms";
        case InvariantId::LogEntryInTermImpliesConfigInTerm: return "LogEntryInTermImpliesConfigInTerm";
        case InvariantId::PrimaryHasEntriesItCreated: return "PrimaryHasEntriesItCreated";
        case InvariantId::LogMatching: return "LogMatching";
        case InvariantId::PrimaryTermAtLeastAsLargeAsLogTerms: return "PrimaryTermAtLeastAsLargeAsLogTerms";
        case InvariantId::TermsOfEntriesGrowMonotonically: return "TermsOfEntriesGrowMonotonically";
        case InvariantId::UniformLogEntriesInTerm: return "UniformLogEntriesInTerm";
        case InvariantId::CommittedEntryIndexesAreNonZero: return "CommittedEntryIndexesAreNonZero";
        case InvariantId::CommittedTermMatchesEntry: return "CommittedTermMatchesEntry";
        case InvariantId::LeaderCompleteness: return "LeaderCompleteness";
        case InvariantId::LogsLaterThanCommittedMustHaveCommitted: return "LogsLaterThanCommittedMustHaveCommitted";
        case InvariantId::ActiveConfigsOverlapWithCommittedEntry: return "ActiveConfigsOverlapWithCommittedEntry";
        case InvariantId::NewerConfigsDisableCommitsInOlderTerm: return "NewerConfigsDisableCommitsInOlderTerm";
        case InvariantId::ConfigsNonEmpty: return "ConfigsNonEmpty";
        case InvariantId::StateMachineSafety: return "StateMachineSafety";
        case InvariantId::MRRInd: return "MRRInd";
    }
    return "?";
}

std::string_view invariant_summary(InvariantId id) {
    switch (id) {
        case InvariantId::TypeOK: return "all state variables are well-typed within the model bounds";
        case InvariantId::ElectionSafety: return "no two distinct primaries share a current term";
        case InvariantId::PrimaryConfigTermEqualToCurrentTerm: return "a primary's config term equals its current term";
        case InvariantId::ConfigVersionAndTermUnique: return "equal (version, term) stamps name equal member sets";
        case InvariantId::PrimaryInTermContainsNewestConfigOfTerm: return "a primary holds the highest config version of its term";
        case InvariantId::ActiveConfigsOverlap: return "quorums of any two active configs intersect";
        case InvariantId::ActiveConfigsSafeAtTerms: return "every quorum of an active config reaches the newest config term";
        case InvariantId::LogEntryInTermImpliesConfigInTerm: return "every log entry term is covered by some config term";
        case InvariantId::PrimaryHasEntriesItCreated: return "entries in a primary's term exist in the primary's log";
        case InvariantId::LogMatching: return "logs agreeing at an index agree on the whole prefix";
        case InvariantId::PrimaryTermAtLeastAsLargeAsLogTerms: return "a primary's term bounds every term in its log";
        case InvariantId::TermsOfEntriesGrowMonotonically: return "each log is a non-decreasing term sequence";
        case InvariantId::UniformLogEntriesInTerm: return "entries of one term occupy consistent positions across logs";
        case InvariantId::CommittedEntryIndexesAreNonZero: return "committed records use 1-based indexes";
        case InvariantId::CommittedTermMatchesEntry: return "every committed record exists in some log";
        case InvariantId::LeaderCompleteness: return "a primary's log contains all commits from earlier terms";
        case InvariantId::LogsLaterThanCommittedMustHaveCommitted: return "logs with entries past a commit's term contain the commit";
        case InvariantId::ActiveConfigsOverlapWithCommittedEntry: return "every quorum of an active config holds each committed entry";
        case InvariantId::NewerConfigsDisableCommitsInOlderTerm: return "a config from a newer term blocks commits by older primaries";
        case InvariantId::ConfigsNonEmpty: return "every configuration has at least one member";
        case InvariantId::StateMachineSafety: return "commits at one index agree on the term";
        case InvariantId::MRRInd: return "conjunction of the twenty inductive-invariant conjuncts";
    }
    return "?";
}

std::optional<InvariantId> invariant_from_name(std::string_view name) {
    for (InvariantId id : kAllIds) {
        if (invariant_name(id) == name) return id;
    }
    return std::nullopt;
}

std::span<const InvariantId> mrr_ind_conjuncts() { return kConjuncts; }
std::span<const InvariantId> all_invariants() { return kAllIds; }

bool config_disabled(const ReplicaSetState& st, ServerId s) {
    const ConfigStamp mine = st.servers[s].stamp();
    const auto quorums = majority_quorums_or_none(st.servers[s].config);
    for (MemberSet q : quorums) {
        bool newer = false;
        q.for_each([&](ServerId n) {
            if (is_newer_config(st.servers[n].stamp(), mine)) newer = true;
        });
        if (!newer) return false;  // this quorum could still act for the config
    }
    return true;  // includes the empty-config case: no quorum can act at all
}

MemberSet active_config_set(const ReplicaSetState& st) {
    MemberSet active;
    for (int s = 0; s < st.server_count(); ++s) {
        if (!config_disabled(st, static_cast<ServerId>(s))) {
            active = active.with(static_cast<ServerId>(s));
        }
    }
    return active;
}

bool eval_invariant(InvariantId id, const ReplicaSetState& st, const ModelBounds& bounds) {
    switch (id) {
        case InvariantId::TypeOK: return type_ok(st, bounds);
        case InvariantId::ElectionSafety: return election_safety(st);
        case InvariantId::PrimaryConfigTermEqualToCurrentTerm: return primary_config_term_equal(st);
        case InvariantId::ConfigVersionAndTermUnique: return config_version_and_term_unique(st);
        case InvariantId::PrimaryInTermContainsNewestConfigOfTerm: return primary_in_term_has_newest_config(st);
        case InvariantId::ActiveConfigsOverlap: return active_configs_overlap(st);
        case InvariantId::ActiveConfigsSafeAtTerms: return active_configs_safe_at_terms(st);
        case InvariantId::LogEntryInTermImpliesConfigInTerm: return log_entry_term_has_config_term(st);
        case InvariantId::PrimaryHasEntriesItCreated: return primary_has_entries_it_created(st);
        case InvariantId::LogMatching: return log_matching(st);
        case InvariantId::PrimaryTermAtLeastAsLargeAsLogTerms: return primary_term_at_least_log_terms(st);
        case InvariantId::TermsOfEntriesGrowMonotonically: return terms_grow_monotonically(st);
        case InvariantId::UniformLogEntriesInTerm: return uniform_log_entries_in_term(st);
        case InvariantId::CommittedEntryIndexesAreNonZero: return committed_indexes_nonzero(st);
        case InvariantId::CommittedTermMatchesEntry: return committed_term_matches_entry(st);
        case InvariantId::LeaderCompleteness: return leader_completeness(st);
        case InvariantId::LogsLaterThanCommittedMustHaveCommitted: return logs_later_than_committed_have_committed(st);
        case InvariantId::ActiveConfigsOverlapWithCommittedEntry: return active_configs_overlap_with_committed(st);
        case InvariantId::NewerConfigsDisableCommitsInOlderTerm: return newer_configs_disable_older_commits(st);
        case InvariantId::ConfigsNonEmpty: return configs_non_empty(st);
        case InvariantId::StateMachineSafety: return state_machine_safety(st);
        case InvariantId::MRRInd: return eval_conjunction(kConjuncts, st, bounds);
    }
    throw std::invalid_argument("unknown invariant");
}

bool eval_conjunction(std::span<const InvariantId> ids, const ReplicaSetState& st,
                      const ModelBounds& bounds) {
    for (InvariantId id : ids) {
        if (!eval_invariant(id, st, bounds)) return false;
    }
    return true;
}

std::vector<std::pair<InvariantId, bool>> eval_all(const ReplicaSetState& st,
                                                   const ModelBounds& bounds) {
    std::vector<std::pair<InvariantId, bool>> out;
    out.reserve(kInvariantCount);
    for (InvariantId id : kAllIds) {
        out.emplace_back(id, eval_invariant(id, st, bounds));
    }
    return out;
}

}  // namespace mrr
