#include "mrr/induction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "mrr/explore.hpp"
#include "mrr/quorum.hpp"

namespace mrr {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Per-sample seed stream: sample i is independent of how samples are
// distributed over workers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// Conjuncts that read the committed set; the exhaustive engine checks the
// rest once per server-variable combination and reuses the verdict across
// all committed subsets.
bool reads_committed(InvariantId id) {
    switch (id) {
        case InvariantId::CommittedEntryIndexesAreNonZero:
        case InvariantId::CommittedTermMatchesEntry:
        case InvariantId::LeaderCompleteness:
        case InvariantId::LogsLaterThanCommittedMustHaveCommitted:
        case InvariantId::ActiveConfigsOverlapWithCommittedEntry:
        case InvariantId::StateMachineSafety:
        case InvariantId::MRRInd:
            return true;
        default:
            return false;
    }
}

// A record with its canonical sort key: (pre-state key, action args). The
// goal (action kind, conjunct) is the cell it lives in.
struct KeyedCti {
    std::string key;
    CtiRecord rec;
};

std::string cti_sort_key(const CtiRecord& rec) {
    std::string key = canonical_key(rec.pre);
    key.push_back(static_cast<char>(rec.action.subject));
    key.push_back(static_cast<char>(rec.action.peer));
    for (std::uint32_t m : {rec.action.quorum.mask(), rec.action.members.mask()}) {
        key.push_back(static_cast<char>(m & 0xff));
        key.push_back(static_cast<char>((m >> 8) & 0xff));
    }
    return key;
}

struct GoalAccumulator {
    GoalMatrix matrix;
    // Per cell, the canonically smallest records seen, capped. The k smallest
    // of a union are the k smallest of each part's k smallest, so merging
    // worker accumulators is partition-independent.
    std::array<std::array<std::vector<KeyedCti>, kConjunctCount>, kActionKindCount> kept{};
    std::uint64_t cap = 0;
    std::uint64_t ctis_total = 0;
    std::uint64_t transitions_checked = 0;

    void insert(CtiRecord rec) {
        auto& bucket = kept[static_cast<int>(rec.action.kind)][static_cast<int>(rec.violated)];
        KeyedCti item{cti_sort_key(rec), std::move(rec)};
        if (bucket.size() == cap && bucket.back().key <= item.key) return;
        auto pos = std::lower_bound(bucket.begin(), bucket.end(), item.key,
                                    [](const KeyedCti& a, const std::string& k) { return a.key < k; });
        bucket.insert(pos, std::move(item));
        if (bucket.size() > cap) bucket.pop_back();
    }

    void merge(GoalAccumulator&& other) {
        for (int r = 0; r < kActionKindCount; ++r) {
            for (int c = 0; c < kConjunctCount; ++c) {
                matrix.cells[r][c].checked += other.matrix.cells[r][c].checked;
                matrix.cells[r][c].ctis += other.matrix.cells[r][c].ctis;
                for (auto& item : other.kept[r][c]) insert(std::move(item.rec));
            }
        }
        ctis_total += other.ctis_total;
        transitions_checked += other.transitions_checked;
    }

    // Cell-major, key-ascending: the canonical report order.
    std::vector<CtiRecord> take_sorted() {
        std::vector<CtiRecord> out;
        for (auto& row : kept) {
            for (auto& bucket : row) {
                for (auto& item : bucket) out.push_back(std::move(item.rec));
            }
        }
        return out;
    }
};

// The goal matrix is indexed by the twenty conjuncts; the checked set must
// stay within them (the candidate set may mention anything).
void require_conjuncts(const std::vector<InvariantId>& check) {
    for (InvariantId id : check) {
        if (static_cast<int>(id) >= kConjunctCount) {
            throw std::invalid_argument("'" + std::string(invariant_name(id)) +
                                        "' is not an inductive-invariant conjunct");
        }
    }
}

// Checks every enabled transition of the selected kinds from a
// candidate-satisfying pre-state.
void check_pre_state(const ReplicaSetState& pre, const ModelBounds& bounds,
                     const ConsecutionOptions& opts, const std::vector<InvariantId>& check,
                     const std::array<bool, kActionKindCount>& kind_selected, GoalAccumulator& acc) {
    for (auto& [action, post] : enumerate_transitions(pre, bounds, opts.protocol)) {
        if (!kind_selected[static_cast<int>(action.kind)]) continue;
        acc.transitions_checked++;
        for (InvariantId c : check) {
            GoalCell& cell = acc.matrix.at(action.kind, c);
            cell.checked++;
            if (!eval_invariant(c, post, bounds)) {
                cell.ctis++;
                acc.ctis_total++;
                if (acc.cap > 0) acc.insert({pre, action, post, c});
            }
        }
    }
}

}  // namespace

std::uint64_t GoalMatrix::total_ctis() const {
    std::uint64_t n = 0;
    for (const auto& row : cells) {
        for (const auto& cell : row) n += cell.ctis;
    }
    return n;
}

InitiationReport check_initiation(const ModelBounds& bounds, MemberSet initial_config) {
    const auto start = Clock::now();
    InitiationReport rep;
    rep.bounds = bounds;
    const ReplicaSetState init = initial_state(bounds, initial_config);
    for (InvariantId id : mrr_ind_conjuncts()) {
        const bool ok = eval_invariant(id, init, bounds);
        rep.conjuncts.emplace_back(id, ok);
        rep.all_pass = rep.all_pass && ok;
    }
    rep.wall_time_ms = elapsed_ms(start);
    return rep;
}

ReplicaSetState random_state(const ModelBounds& bounds, std::uint64_t seed) {
    bounds.validate();
    std::mt19937_64 rng(splitmix64(seed));
    // Plain modulo: bit-identical draws on every platform.
    auto draw = [&](std::uint64_t k) { return static_cast<std::uint32_t>(rng() % k); };

    const int n = bounds.server_count();
    const std::uint32_t T = bounds.max_term;
    const std::uint32_t L = bounds.max_log_len;
    const std::uint32_t V = bounds.max_config_version;
    ReplicaSetState st;
    st.servers.resize(n);

    if (draw(8) == 0) {
        // Uniform arm: every bounded TypeOK state has non-zero probability.
        for (auto& s : st.servers) {
            s.log.resize(draw(L + 1));
            for (auto& e : s.log) e = draw(T + 1);
            s.term = draw(T + 1);
            s.role = draw(4) == 0 ? Role::Primary : Role::Secondary;
            s.config = MemberSet(draw(1u << n));
            s.config_version = draw(V + 1);
            s.config_term = draw(T + 1);
        }
        for (std::uint32_t i = 0; i <= L; ++i) {
            for (std::uint32_t t = 0; t <= T; ++t) {
                if (draw(8) == 0) st.add_commit({i, t});
            }
        }
        return st;
    }

    // Structured arm: build a plausible epoch. One master log, a short chain
    // of configs, terms clustered at the newest config term.
    const std::uint32_t top_term = 1 + draw(T);

    std::vector<std::uint32_t> master(draw(L + 1));
    for (auto& e : master) e = 1 + draw(top_term);
    std::sort(master.begin(), master.end());

    const int chain_len = 1 + static_cast<int>(draw(2));
    std::vector<MemberSet> chain_sets(chain_len);
    std::vector<ConfigStamp> chain_stamps(chain_len);
    std::uint32_t ver = 1 + draw(V);
    std::uint32_t cterm = draw(top_term + 1);
    for (int k = 0; k < chain_len; ++k) {
        chain_sets[k] = MemberSet(1 + draw((1u << n) - 1));
        chain_stamps[k] = {ver, cterm};
        ver = std::min(V, ver + 1 + draw(2));
        cterm = std::min(T, cterm + draw(top_term + 1));
    }

    for (auto& s : st.servers) {
        const int k = static_cast<int>(draw(chain_len));
        s.config = chain_sets[k];
        s.config_version = chain_stamps[k].version;
        s.config_term = chain_stamps[k].term;
    }

    std::uint32_t newest_cterm = 0;
    for (const auto& s : st.servers) newest_cterm = std::max(newest_cterm, s.config_term);

    for (auto& s : st.servers) {
        // Most servers have caught up with the newest config term.
        if (draw(4) != 0) {
            s.term = std::min(T, newest_cterm + draw(2));
        } else {
            s.term = draw(newest_cterm + 1);
        }
        // Log: usually a master prefix; occasionally a divergent tail.
        const std::uint32_t len = draw(static_cast<std::uint32_t>(master.size()) + 1);
        s.log.assign(master.begin(), master.begin() + len);
        if (!s.log.empty() && draw(8) == 0) {
            s.log.back() = 1 + draw(top_term);
            std::sort(s.log.begin(), s.log.end());
        }
    }

    auto install_primary = [&](ServerId p, std::uint32_t term) {
        auto& prim = st.servers[p];
        prim.role = Role::Primary;
        prim.log.assign(master.begin(), master.end());
        prim.term = term;
        prim.config_term = term;
        for (const auto& s : st.servers) {
            if (s.config_term == term) {
                prim.config_version = std::max(prim.config_version, s.config_version);
            }
        }
    };
    const std::uint32_t primary_term = std::max({1u, newest_cterm, last_term(master)});

    const auto role_mode = draw(8);
    if (role_mode < 4) {
        // One primary, holding the longest log and the newest config of its
        // term, with its config term equal to its term.
        const ServerId p = static_cast<ServerId>(draw(n));
        install_primary(p, std::max(primary_term, st.servers[p].term));
    } else if (role_mode == 4 && n >= 2) {
        // Two primaries sharing a term: never invariant-consistent, but the
        // prime hunting ground once ElectionSafety is dropped from the
        // candidate. Identical logs and configs keep the rest satisfiable.
        const ServerId p1 = static_cast<ServerId>(draw(n));
        const ServerId p2 = static_cast<ServerId>((p1 + 1 + draw(n - 1)) % n);
        install_primary(p1, primary_term);
        install_primary(p2, primary_term);
        st.servers[p2].config = st.servers[p1].config;
        st.servers[p2].config_version = st.servers[p1].config_version =
            std::max(st.servers[p1].config_version, st.servers[p2].config_version);
    }

    // Commit a replicated master prefix.
    std::uint32_t replicated = static_cast<std::uint32_t>(master.size());
    for (const auto& s : st.servers) {
        replicated = std::min(replicated, static_cast<std::uint32_t>(s.log.size()));
    }
    if (replicated > 0 && draw(2) == 0) {
        const std::uint32_t upto = 1 + draw(replicated);
        for (std::uint32_t i = 1; i <= upto; ++i) {
            if (st.servers[0].log[i - 1] == master[i - 1]) {
                st.add_commit({i, master[i - 1]});
            }
        }
    }
    return st;
}

ConsecutionReport check_consecution_sampled(const ModelBounds& bounds, std::uint64_t samples,
                                            std::uint64_t seed, const ConsecutionOptions& opts) {
    bounds.validate();
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    require_conjuncts(opts.check);
    const auto start = Clock::now();

    const std::vector<InvariantId>& candidate = opts.candidate;
    const std::vector<InvariantId>& check = opts.check;
    std::array<bool, kActionKindCount> kind_selected{};
    for (ActionKind k : opts.actions) kind_selected[static_cast<int>(k)] = true;

    const size_t threads = static_cast<size_t>(std::max(1, opts.threads));
    std::vector<GoalAccumulator> accs(threads);
    for (auto& acc : accs) acc.cap = opts.max_ctis_per_goal;
    std::vector<std::uint64_t> accepted_per(threads, 0);

    auto work = [&](size_t who) {
        for (std::uint64_t i = who; i < samples; i += threads) {
            const ReplicaSetState pre = random_state(bounds, derive_seed(seed, i));
            if (!eval_conjunction(candidate, pre, bounds)) continue;
            accepted_per[who]++;
            check_pre_state(pre, bounds, opts, check, kind_selected, accs[who]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    ConsecutionReport rep;
    rep.bounds = bounds;
    rep.exhaustive = false;
    rep.samples_drawn = samples;
    for (std::uint64_t a : accepted_per) rep.samples_accepted += a;
    GoalAccumulator merged;
    merged.cap = opts.max_ctis_per_goal;
    for (auto& acc : accs) merged.merge(std::move(acc));
    rep.matrix = merged.matrix;
    rep.ctis_total = merged.ctis_total;
    rep.transitions_checked = merged.transitions_checked;
    rep.ctis = merged.take_sorted();
    rep.wall_time_ms = elapsed_ms(start);
    return rep;
}

double type_ok_cardinality(const ModelBounds& bounds) {
    const double T = bounds.max_term + 1.0;
    const double V = bounds.max_config_version + 1.0;
    double logs = 0.0;
    for (std::uint32_t l = 0; l <= bounds.max_log_len; ++l) logs += std::pow(T, l);
    const double configs = std::pow(2.0, bounds.server_count());
    const double per_server = logs * T * 2.0 * configs * V * T;
    const double records = (bounds.max_log_len + 1.0) * T;
    return std::pow(per_server, bounds.server_count()) * std::pow(2.0, records);
}

namespace {

// All logs of length <= max_log_len over terms 0..max_term, in a fixed
// (length-then-entries) order.
std::vector<std::vector<std::uint32_t>> all_logs(const ModelBounds& bounds) {
    std::vector<std::vector<std::uint32_t>> out;
    out.push_back({});
    std::vector<std::vector<std::uint32_t>> prev = {{}};
    for (std::uint32_t l = 1; l <= bounds.max_log_len; ++l) {
        std::vector<std::vector<std::uint32_t>> cur;
        for (const auto& base : prev) {
            for (std::uint32_t t = 0; t <= bounds.max_term; ++t) {
                auto log = base;
                log.push_back(t);
                cur.push_back(std::move(log));
            }
        }
        for (const auto& log : cur) out.push_back(log);
        prev = std::move(cur);
    }
    return out;
}

struct ServerDomain {
    std::vector<std::vector<std::uint32_t>> logs;
    std::uint64_t terms, roles, configs, versions, config_terms;
    std::uint64_t size;

    explicit ServerDomain(const ModelBounds& b)
        : logs(all_logs(b)),
          terms(b.max_term + 1),
          roles(2),
          configs(1ull << b.server_count()),
          versions(b.max_config_version + 1),
          config_terms(b.max_term + 1) {
        size = logs.size() * terms * roles * configs * versions * config_terms;
    }

    void decode(std::uint64_t idx, ServerState& s) const {
        s.log = logs[idx % logs.size()];
        idx /= logs.size();
        s.term = static_cast<std::uint32_t>(idx % terms);
        idx /= terms;
        s.role = (idx % roles) ? Role::Primary : Role::Secondary;
        idx /= roles;
        s.config = MemberSet(static_cast<std::uint32_t>(idx % configs));
        idx /= configs;
        s.config_version = static_cast<std::uint32_t>(idx % versions);
        idx /= versions;
        s.config_term = static_cast<std::uint32_t>(idx % config_terms);
    }
};

}  // namespace

ConsecutionReport check_consecution_exhaustive(const ModelBounds& bounds,
                                               const ConsecutionOptions& opts) {
    bounds.validate();
    require_conjuncts(opts.check);
    const auto start = Clock::now();

    const double estimate = type_ok_cardinality(bounds);
    if (estimate > static_cast<double>(opts.exhaustive_budget)) {
        throw std::runtime_error(
            "bounded TypeOK space has about " + std::to_string(estimate) +
            " states, over the exhaustive budget of " + std::to_string(opts.exhaustive_budget));
    }

    const std::vector<InvariantId>& candidate = opts.candidate;
    const std::vector<InvariantId>& check = opts.check;
    std::array<bool, kActionKindCount> kind_selected{};
    for (ActionKind k : opts.actions) kind_selected[static_cast<int>(k)] = true;

    std::vector<InvariantId> candidate_vars, candidate_committed;
    for (InvariantId id : candidate) {
        (reads_committed(id) ? candidate_committed : candidate_vars).push_back(id);
    }

    const ServerDomain dom(bounds);
    const int n = bounds.server_count();
    std::uint64_t var_combos = 1;
    for (int i = 0; i < n; ++i) var_combos *= dom.size;

    std::vector<CommitRecord> records;
    for (std::uint32_t i = 0; i <= bounds.max_log_len; ++i) {
        for (std::uint32_t t = 0; t <= bounds.max_term; ++t) records.push_back({i, t});
    }
    std::sort(records.begin(), records.end());
    const std::uint64_t committed_subsets = 1ull << records.size();

    const size_t threads = static_cast<size_t>(std::max(1, opts.threads));
    std::vector<GoalAccumulator> accs(threads);
    for (auto& acc : accs) acc.cap = opts.max_ctis_per_goal;
    std::vector<std::uint64_t> accepted_per(threads, 0), enumerated_per(threads, 0);

    auto work = [&](size_t who) {
        ReplicaSetState st;
        st.servers.resize(n);
        for (std::uint64_t combo = who; combo < var_combos; combo += threads) {
            std::uint64_t idx = combo;
            for (int s = 0; s < n; ++s) {
                dom.decode(idx % dom.size, st.servers[s]);
                idx /= dom.size;
            }
            enumerated_per[who] += committed_subsets;
            st.committed.clear();
            if (!eval_conjunction(candidate_vars, st, bounds)) continue;
            for (std::uint64_t mask = 0; mask < committed_subsets; ++mask) {
                st.committed.clear();
                for (size_t r = 0; r < records.size(); ++r) {
                    if (mask & (1ull << r)) st.committed.push_back(records[r]);
                }
                if (!eval_conjunction(candidate_committed, st, bounds)) continue;
                accepted_per[who]++;
                check_pre_state(st, bounds, opts, check, kind_selected, accs[who]);
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    ConsecutionReport rep;
    rep.bounds = bounds;
    rep.exhaustive = true;
    GoalAccumulator merged;
    merged.cap = opts.max_ctis_per_goal;
    for (size_t w = 0; w < threads; ++w) {
        rep.samples_accepted += accepted_per[w];
        rep.states_enumerated += enumerated_per[w];
        merged.merge(std::move(accs[w]));
    }
    rep.matrix = merged.matrix;
    rep.ctis_total = merged.ctis_total;
    rep.transitions_checked = merged.transitions_checked;
    rep.ctis = merged.take_sorted();
    rep.wall_time_ms = elapsed_ms(start);
    return rep;
}

}  // namespace mrr
