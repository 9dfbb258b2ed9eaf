#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrr/actions.hpp"
#include "mrr/invariants.hpp"
#include "mrr/state.hpp"

namespace mrr {

// A finite behavior: the initial state plus an alternating action/state
// sequence. Traces are standalone: they carry the bounds and the mutation
// switches they were produced under, so replay re-runs the same semantics.
struct Trace {
    ModelBounds bounds;
    ProtocolOptions protocol;
    std::optional<std::uint64_t> seed;
    ReplicaSetState init;
    std::vector<std::pair<ActionInstance, ReplicaSetState>> steps;
};

struct Violation {
    InvariantId invariant = InvariantId::TypeOK;
    Trace trace;
};

enum class StopReason : std::uint8_t {
    Exhausted = 0,   // full reachable space visited
    Budget,          // maxStates reached; report is incomplete
    FirstViolation,  // stopAtFirst fired after finishing the level
};

std::string_view to_string(StopReason r);

struct CheckReport {
    ModelBounds bounds;
    std::vector<InvariantId> invariants;
    std::uint64_t states_visited = 0;
    std::uint64_t transitions_explored = 0;
    std::uint32_t diameter = 0;
    std::uint64_t deadlock_states = 0;
    StopReason stop_reason = StopReason::Exhausted;
    bool complete = true;
    std::uint64_t violations_total = 0;  // violations keeps at most max_violations traces
    std::vector<Violation> violations;
    std::uint64_t wall_time_ms = 0;  // excluded from determinism comparisons
    bool deterministic = true;
};

struct BfsOptions {
    std::uint64_t max_states = 50'000'000;
    std::uint64_t max_violations = 64;
    bool stop_at_first = false;
    int threads = 1;
    ProtocolOptions protocol;
    MemberSet initial_config;  // empty = full membership
};

// Injective, platform-stable key for a bounded state: a compact byte string
// with all fields in canonical order (servers ascending, sets as bit runs,
// committed sorted). Equal states give equal bytes and vice versa.
std::string canonical_key(const ReplicaSetState& st);

// Level-synchronous breadth-first search from initial_state(bounds). Every
// dequeued state is checked against the selected invariants; violations get
// a shortest trace reconstructed through predecessor links. stop_at_first
// finishes the current level before stopping so the shortest-trace guarantee
// survives parallel expansion; same-level violations are reported sorted by
// canonical key of their end state.
CheckReport bfs_check(const ModelBounds& bounds, std::vector<InvariantId> invariants,
                      const BfsOptions& opts = {});

struct WalkResult {
    CheckReport report;
    Trace trace;
};

// Seeded uniform random walk over enabled transitions; stops at a violation,
// a deadlock, or the step budget. Same seed, same bytes.
WalkResult random_walk(const ModelBounds& bounds, std::uint64_t steps, std::uint64_t seed,
                       std::vector<InvariantId> invariants, const ProtocolOptions& protocol = {},
                       MemberSet initial_config = MemberSet());

struct ReplayResult {
    bool valid = true;
    std::size_t bad_step = 0;           // 1-based index of the failing step
    std::string error;                  // non-empty when !valid
    std::vector<Violation> violations;  // invariant failures along the replayed trace
};

// Re-validates a trace step by step: each action must be enabled in its
// pre-state and must reproduce the recorded post-state exactly; the selected
// invariants are re-evaluated on every state.
ReplayResult replay_trace(const Trace& trace, std::vector<InvariantId> invariants);

}  // namespace mrr
