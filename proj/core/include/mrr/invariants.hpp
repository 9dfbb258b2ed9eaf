#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mrr/state.hpp"

namespace mrr {

// Named state predicates. Ids 0..19 are the twenty conjuncts of the inductive
// invariant, in goal-matrix column order; the last two are the top-level
// safety property and the full conjunction.
enum class InvariantId : std::uint8_t {
    TypeOK = 0,
    ElectionSafety,
    PrimaryConfigTermEqualToCurrentTerm,
    ConfigVersionAndTermUnique,
    PrimaryInTermContainsNewestConfigOfTerm,
    ActiveConfigsOverlap,
    ActiveConfigsSafeAtTerms,
    LogEntryInTermImpliesConfigInTerm,
    PrimaryHasEntriesItCreated,
    LogMatching,
    PrimaryTermAtLeastAsLargeAsLogTerms,
    TermsOfEntriesGrowMonotonically,
    UniformLogEntriesInTerm,
    CommittedEntryIndexesAreNonZero,
    CommittedTermMatchesEntry,
    LeaderCompleteness,
    LogsLaterThanCommittedMustHaveCommitted,
    ActiveConfigsOverlapWithCommittedEntry,
    NewerConfigsDisableCommitsInOlderTerm,
    ConfigsNonEmpty,
    StateMachineSafety,
    MRRInd,
};

inline constexpr int kConjunctCount = 20;    // columns of the goal matrix
inline constexpr int kInvariantCount = 22;   // registry size

std::string_view invariant_name(InvariantId id);
std::string_view invariant_summary(InvariantId id);  // one-line description
std::optional<InvariantId> invariant_from_name(std::string_view name);

// The twenty conjuncts in catalog order.
std::span<const InvariantId> mrr_ind_conjuncts();
// All 22 registered ids in catalog order.
std::span<const InvariantId> all_invariants();

// A server's config is disabled once every one of its quorums contains a
// member holding a strictly newer config stamp; such a config can no longer
// win an election or satisfy a reconfig's config-quorum check.
bool config_disabled(const ReplicaSetState& st, ServerId s);

// Servers whose config is not disabled.
MemberSet active_config_set(const ReplicaSetState& st);

// Evaluates one predicate. Non-TypeOK states are tolerated: out-of-domain
// values simply fail the predicates that look at them. Throws only on an
// id outside the registry.
bool eval_invariant(InvariantId id, const ReplicaSetState& st, const ModelBounds& bounds);

// Short-circuit conjunction of a selected set.
bool eval_conjunction(std::span<const InvariantId> ids, const ReplicaSetState& st,
                      const ModelBounds& bounds);

// Full map, no short-circuiting.
std::vector<std::pair<InvariantId, bool>> eval_all(const ReplicaSetState& st,
                                                   const ModelBounds& bounds);

}  // namespace mrr
