#include "mrr/explore.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace mrr {

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::Exhausted: return "exhausted";
        case StopReason::Budget: return "budget";
        case StopReason::FirstViolation: return "first-violation";
    }
    return "?";
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::string& in, size_t& pos) {
    const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])); };
    const std::uint32_t v = b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
    pos += 4;
    return v;
}

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

}  // namespace

std::string canonical_key(const ReplicaSetState& st) {
    std::string out;
    out.reserve(st.server_count() * 24 + st.committed.size() * 8 + 8);
    out.push_back(static_cast<char>(st.server_count()));
    for (const auto& s : st.servers) {
        out.push_back(static_cast<char>(s.log.size()));
        for (std::uint32_t e : s.log) put_u32(out, e);
        put_u32(out, s.term);
        out.push_back(s.role == Role::Primary ? 'P' : 'S');
        put_u32(out, s.config.mask());
        put_u32(out, s.config_version);
        put_u32(out, s.config_term);
    }
    out.push_back(static_cast<char>(st.committed.size()));
    for (const auto& c : st.committed) {  // sorted by construction
        put_u32(out, c.index);
        put_u32(out, c.term);
    }
    return out;
}

namespace {

// Inverse of canonical_key; the BFS stores states only in key form.
ReplicaSetState state_from_key(const std::string& key) {
    ReplicaSetState st;
    size_t pos = 0;
    const int n = static_cast<unsigned char>(key[pos++]);
    st.servers.resize(n);
    for (auto& s : st.servers) {
        const int len = static_cast<unsigned char>(key[pos++]);
        s.log.resize(len);
        for (int i = 0; i < len; ++i) s.log[i] = get_u32(key, pos);
        s.term = get_u32(key, pos);
        s.role = key[pos++] == 'P' ? Role::Primary : Role::Secondary;
        s.config = MemberSet(get_u32(key, pos));
        s.config_version = get_u32(key, pos);
        s.config_term = get_u32(key, pos);
    }
    const int nc = static_cast<unsigned char>(key[pos++]);
    st.committed.resize(nc);
    for (auto& c : st.committed) {
        c.index = get_u32(key, pos);
        c.term = get_u32(key, pos);
    }
    return st;
}

// Per-state bookkeeping; the owning key lives in the visited map, whose
// nodes are pointer-stable.
struct Meta {
    const std::string* key = nullptr;
    std::int64_t parent = -1;
    ActionInstance via;
    std::uint32_t depth = 0;
};

Trace trace_to(const std::vector<Meta>& arena, std::int64_t idx, const ModelBounds& bounds,
               const ProtocolOptions& protocol) {
    std::vector<std::pair<ActionInstance, ReplicaSetState>> steps;
    std::int64_t cur = idx;
    while (arena[cur].parent >= 0) {
        steps.emplace_back(arena[cur].via, state_from_key(*arena[cur].key));
        cur = arena[cur].parent;
    }
    std::reverse(steps.begin(), steps.end());
    Trace t;
    t.bounds = bounds;
    t.protocol = protocol;
    t.init = state_from_key(*arena[cur].key);
    t.steps = std::move(steps);
    return t;
}

}  // namespace

CheckReport bfs_check(const ModelBounds& bounds, std::vector<InvariantId> invariants,
                      const BfsOptions& opts) {
    bounds.validate();
    const auto start = Clock::now();
    const size_t threads = static_cast<size_t>(std::max(1, opts.threads));

    CheckReport report;
    report.bounds = bounds;
    report.invariants = invariants;

    std::unordered_map<std::string, std::int64_t> visited;
    std::vector<Meta> arena;
    {
        auto [it, ok] = visited.emplace(canonical_key(initial_state(bounds, opts.initial_config)), 0);
        arena.push_back({&it->first, -1, {}, 0});
    }

    std::vector<std::int64_t> frontier{0};
    std::uint64_t transitions = 0;
    std::uint64_t deadlocks = 0;
    bool budget_hit = false;
    bool stop_after_level = false;

    std::vector<std::pair<std::int64_t, InvariantId>> violations;

    while (!frontier.empty() && !stop_after_level && !budget_hit) {
        // Each worker takes frontier positions who, who+threads, ... and
        // records per-position results, so the merge below can replay them
        // in frontier order and the outcome is thread-count independent.
        struct Slot {
            std::vector<std::pair<ActionInstance, std::string>> succs;  // action, key
            std::vector<InvariantId> violated;
        };
        std::vector<Slot> slots(frontier.size());
        auto expand = [&](size_t who) {
            for (size_t i = who; i < frontier.size(); i += threads) {
                const ReplicaSetState st = state_from_key(*arena[frontier[i]].key);
                Slot& slot = slots[i];
                for (InvariantId inv : invariants) {
                    if (!eval_invariant(inv, st, bounds)) slot.violated.push_back(inv);
                }
                for (auto& [act, next] : enumerate_transitions(st, bounds, opts.protocol)) {
                    slot.succs.emplace_back(act, canonical_key(next));
                }
            }
        };
        if (threads == 1) {
            expand(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (size_t w = 0; w < threads; ++w) pool.emplace_back(expand, w);
            for (auto& th : pool) th.join();
        }

        std::vector<std::int64_t> next_frontier;
        for (size_t i = 0; i < frontier.size(); ++i) {
            Slot& slot = slots[i];
            for (InvariantId inv : slot.violated) {
                violations.emplace_back(frontier[i], inv);
                if (opts.stop_at_first) stop_after_level = true;
            }
            transitions += slot.succs.size();
            if (slot.succs.empty()) deadlocks++;
            if (budget_hit) continue;
            for (auto& [act, key] : slot.succs) {
                auto [it, inserted] = visited.emplace(std::move(key), static_cast<std::int64_t>(arena.size()));
                if (!inserted) continue;
                arena.push_back({&it->first, frontier[i], act, arena[frontier[i]].depth + 1});
                next_frontier.push_back(static_cast<std::int64_t>(arena.size()) - 1);
                if (arena.size() >= opts.max_states) budget_hit = true;
            }
        }
        frontier = std::move(next_frontier);
    }

    report.states_visited = arena.size();
    report.transitions_explored = transitions;
    report.deadlock_states = deadlocks;
    report.diameter = arena.back().depth;
    if (opts.stop_at_first && stop_after_level) {
        report.stop_reason = StopReason::FirstViolation;
        report.complete = false;
    } else if (budget_hit) {
        report.stop_reason = StopReason::Budget;
        report.complete = false;
    } else {
        report.stop_reason = StopReason::Exhausted;
        report.complete = true;
    }

    std::sort(violations.begin(), violations.end(), [&](const auto& a, const auto& b) {
        if (arena[a.first].depth != arena[b.first].depth) return arena[a.first].depth < arena[b.first].depth;
        if (*arena[a.first].key != *arena[b.first].key) return *arena[a.first].key < *arena[b.first].key;
        return a.second < b.second;
    });
    report.violations_total = violations.size();
    if (violations.size() > opts.max_violations) violations.resize(opts.max_violations);
    for (const auto& [idx, inv] : violations) {
        Violation v;
        v.invariant = inv;
        v.trace = trace_to(arena, idx, bounds, opts.protocol);
        report.violations.push_back(std::move(v));
    }

    report.wall_time_ms = elapsed_ms(start);
    return report;
}

WalkResult random_walk(const ModelBounds& bounds, std::uint64_t steps, std::uint64_t seed,
                       std::vector<InvariantId> invariants, const ProtocolOptions& protocol,
                       MemberSet initial_config) {
    bounds.validate();
    const auto start = Clock::now();

    WalkResult result;
    result.trace.bounds = bounds;
    result.trace.protocol = protocol;
    result.trace.seed = seed;
    result.trace.init = initial_state(bounds, initial_config);
    result.report.bounds = bounds;
    result.report.invariants = invariants;

    std::mt19937_64 rng(seed);
    ReplicaSetState current = result.trace.init;
    std::uint64_t transitions = 0;
    std::uint32_t depth = 0;

    auto check = [&](const ReplicaSetState& st) {
        bool bad = false;
        for (InvariantId inv : invariants) {
            if (!eval_invariant(inv, st, bounds)) {
                Violation v;
                v.invariant = inv;
                v.trace = result.trace;
                result.report.violations.push_back(std::move(v));
                bad = true;
            }
        }
        return bad;
    };

    if (!check(current)) {
        for (std::uint64_t i = 0; i < steps; ++i) {
            auto succs = enumerate_transitions(current, bounds, protocol);
            transitions += succs.size();
            if (succs.empty()) {
                result.report.deadlock_states = 1;
                break;
            }
            // Plain modulo keeps the draw bit-identical across platforms; the
            // distribution skew is irrelevant for smoke exploration.
            const auto pick = static_cast<size_t>(rng() % succs.size());
            current = succs[pick].second;
            result.trace.steps.emplace_back(succs[pick].first, current);
            ++depth;
            if (check(current)) break;
        }
    }

    result.report.states_visited = 1 + result.trace.steps.size();
    result.report.transitions_explored = transitions;
    result.report.diameter = depth;
    result.report.violations_total = result.report.violations.size();
    result.report.complete = true;
    result.report.wall_time_ms = elapsed_ms(start);
    return result;
}

ReplayResult replay_trace(const Trace& trace, std::vector<InvariantId> invariants) {
    ReplayResult res;
    trace.bounds.validate();

    auto record_violations = [&](const ReplicaSetState& st, std::size_t upto) {
        for (InvariantId inv : invariants) {
            if (!eval_invariant(inv, st, trace.bounds)) {
                Violation v;
                v.invariant = inv;
                v.trace.bounds = trace.bounds;
                v.trace.protocol = trace.protocol;
                v.trace.seed = trace.seed;
                v.trace.init = trace.init;
                v.trace.steps.assign(trace.steps.begin(), trace.steps.begin() + upto);
                res.violations.push_back(std::move(v));
            }
        }
    };

    if (!type_ok(trace.init, trace.bounds)) {
        res.valid = false;
        res.error = "initial state violates TypeOK for the embedded bounds";
        return res;
    }
    record_violations(trace.init, 0);

    ReplicaSetState current = trace.init;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& [action, recorded] = trace.steps[i];
        std::optional<ReplicaSetState> next;
        try {
            next = apply_action(current, action, trace.protocol);
        } catch (const std::invalid_argument& e) {
            res.valid = false;
            res.bad_step = i + 1;
            res.error = e.what();
            return res;
        }
        if (!next) {
            res.valid = false;
            res.bad_step = i + 1;
            res.error = "action not enabled in its pre-state";
            return res;
        }
        if (*next != recorded) {
            res.valid = false;
            res.bad_step = i + 1;
            res.error = "recorded post-state differs from the applied action's result";
            return res;
        }
        current = std::move(*next);
        record_violations(current, i + 1);
    }
    return res;
}

}  // namespace mrr
