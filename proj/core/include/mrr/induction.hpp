#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mrr/actions.hpp"
#include "mrr/invariants.hpp"
#include "mrr/state.hpp"

namespace mrr {

// A counterexample to induction: an enabled transition from a state that
// satisfies the candidate invariant to one that violates a checked conjunct.
struct CtiRecord {
    ReplicaSetState pre;
    ActionInstance action;
    ReplicaSetState post;
    InvariantId violated = InvariantId::TypeOK;
};

struct GoalCell {
    std::uint64_t checked = 0;  // post-states evaluated for this (action, conjunct)
    std::uint64_t ctis = 0;

    enum class Status { NotExercised, Pass, CtiFound };
    Status status() const {
        if (ctis > 0) return Status::CtiFound;
        return checked > 0 ? Status::Pass : Status::NotExercised;
    }
};

// The consecution obligation split into one cell per protocol action and
// invariant conjunct: 8 x 20 = 160 goals.
struct GoalMatrix {
    std::array<std::array<GoalCell, kConjunctCount>, kActionKindCount> cells{};

    GoalCell& at(ActionKind a, InvariantId c) {
        return cells[static_cast<int>(a)][static_cast<int>(c)];
    }
    const GoalCell& at(ActionKind a, InvariantId c) const {
        return cells[static_cast<int>(a)][static_cast<int>(c)];
    }
    std::uint64_t total_ctis() const;
};

struct InitiationReport {
    ModelBounds bounds;
    std::vector<std::pair<InvariantId, bool>> conjuncts;  // catalog order
    bool all_pass = true;
    std::uint64_t wall_time_ms = 0;
};

// Evaluates every conjunct on the initial state (optionally with a variant
// initial member set).
InitiationReport check_initiation(const ModelBounds& bounds, MemberSet initial_config = MemberSet());

// A seeded, reproducible draw from the bounded TypeOK space. Biased towards
// states that satisfy the inductive invariant (correlated terms, shared log
// prefixes, commit records taken from replicated prefixes), with a uniform
// arm that keeps every TypeOK state reachable with non-zero probability.
ReplicaSetState random_state(const ModelBounds& bounds, std::uint64_t seed);

struct ConsecutionOptions {
    // Used exactly as given; an empty set selects nothing.
    std::vector<InvariantId> candidate{mrr_ind_conjuncts().begin(), mrr_ind_conjuncts().end()};
    std::vector<InvariantId> check{mrr_ind_conjuncts().begin(), mrr_ind_conjuncts().end()};
    std::vector<ActionKind> actions{all_action_kinds.begin(), all_action_kinds.end()};
    int threads = 1;
    std::uint64_t max_ctis_per_goal = 4;   // records kept; matrix counts are exact
    std::uint64_t exhaustive_budget = 200'000'000;
    ProtocolOptions protocol;
};

struct ConsecutionReport {
    ModelBounds bounds;
    bool exhaustive = false;
    std::uint64_t samples_drawn = 0;
    std::uint64_t samples_accepted = 0;   // candidate-satisfying pre-states
    std::uint64_t states_enumerated = 0;  // exhaustive mode
    std::uint64_t transitions_checked = 0;
    GoalMatrix matrix;
    std::vector<CtiRecord> ctis;  // canonically sorted, capped per goal
    std::uint64_t ctis_total = 0;
    std::uint64_t wall_time_ms = 0;
};

// Draws `samples` random states; candidate-satisfying ones have every enabled
// transition of the selected kinds checked against the selected conjuncts.
// Fully reproducible from (bounds, samples, seed); thread count never changes
// the result.
ConsecutionReport check_consecution_sampled(const ModelBounds& bounds, std::uint64_t samples,
                                            std::uint64_t seed, const ConsecutionOptions& opts = {});

// Enumerates the whole bounded TypeOK space instead of sampling. Refuses
// with the cardinality estimate (std::runtime_error) when the space exceeds
// the configured budget.
ConsecutionReport check_consecution_exhaustive(const ModelBounds& bounds,
                                               const ConsecutionOptions& opts = {});

// Size of the bounded TypeOK space as a double (it overflows u64 quickly).
double type_ok_cardinality(const ModelBounds& bounds);

}  // namespace mrr
