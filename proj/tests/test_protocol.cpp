#include <doctest.h>

#include <algorithm>
#include <set>

#include "mrr/actions.hpp"
#include "mrr/induction.hpp"
#include "mrr/quorum.hpp"
#include "naive_oracle.hpp"
#include "test_helpers.hpp"

using namespace mrr;
using namespace mrr::test;

TEST_CASE("majority quorums") {
    CHECK(majority_quorums(set_of({0})) == std::vector<MemberSet>{set_of({0})});

    const auto q3 = majority_quorums(set_of({0, 1, 2}));
    const std::vector<MemberSet> expected3 = {set_of({0, 1}), set_of({0, 2}), set_of({1, 2}),
                                              set_of({0, 1, 2})};
    CHECK(q3 == expected3);

    const auto q4 = majority_quorums(set_of({0, 1, 2, 3}));
    CHECK(q4.size() == 5);
    for (MemberSet q : q4) CHECK(q.size() >= 3);

    CHECK_THROWS_AS(majority_quorums(MemberSet()), std::invalid_argument);
    CHECK(majority_quorums_or_none(MemberSet()).empty());
}

TEST_CASE("quorum overlap") {
    CHECK(quorums_overlap(set_of({0, 1}), set_of({0})));
    CHECK(quorums_overlap(set_of({0, 1, 2}), set_of({0, 1})));
    CHECK_FALSE(quorums_overlap(set_of({0, 1, 2}), set_of({0})));
    CHECK_FALSE(quorums_overlap(set_of({0}), set_of({1})));
    // Distinct three-member sets admit disjoint majorities.
    CHECK_FALSE(quorums_overlap(set_of({0, 1, 2}), set_of({0, 1, 3})));
}

TEST_CASE("config stamp order compares term first") {
    CHECK(is_newer_config({1, 2}, {2, 1}));
    CHECK(is_newer_config({3, 1}, {2, 1}));
    CHECK_FALSE(is_newer_config({2, 2}, {2, 2}));

    CHECK(is_newer_or_equal_config({2, 2}, {2, 2}));
    CHECK(is_newer_or_equal_config({1, 2}, {9, 1}));
    CHECK_FALSE(is_newer_or_equal_config({1, 1}, {2, 1}));
}

TEST_CASE("in_log and last_term") {
    const auto b = ModelBounds::make(1, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) { s.servers[0].log = {1, 1, 2}; });
    CHECK(in_log(3, 2, st, 0));
    CHECK_FALSE(in_log(3, 1, st, 0));
    CHECK_FALSE(in_log(0, 1, st, 0));
    CHECK_FALSE(in_log(4, 2, st, 0));

    st.servers[0].log = {};
    CHECK_FALSE(in_log(1, 1, st, 0));

    CHECK(last_term({}) == 0);
    CHECK(last_term({1, 1, 3}) == 3);
    CHECK(last_term({2}) == 2);
}

TEST_CASE("client_request appends the primary's term") {
    const auto b = ModelBounds::make(2, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].role = Role::Primary;
        s.servers[0].term = 2;
        s.servers[0].config_term = 2;
        s.servers[0].log = {1};
    });
    auto next = client_request(st, 0);
    REQUIRE(next);
    CHECK(next->servers[0].log == log_of({1, 2}));
    CHECK(next->servers[1] == st.servers[1]);

    st.servers[0].log = {};
    st.servers[0].term = 1;
    next = client_request(st, 0);
    REQUIRE(next);
    CHECK(next->servers[0].log == log_of({1}));

    CHECK_FALSE(client_request(st, 1));  // secondaries reject writes
    CHECK_THROWS_AS(client_request(st, 5), std::invalid_argument);
}

TEST_CASE("get_entries pulls the next entry past a matching prefix") {
    const auto b = ModelBounds::make(2, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].log = {1};
        s.servers[1].log = {1, 2};
    });
    auto next = get_entries(st, 0, 1);
    REQUIRE(next);
    CHECK(next->servers[0].log == log_of({1, 2}));

    st.servers[0].log = {};
    st.servers[1].log = {3};
    next = get_entries(st, 0, 1);
    REQUIRE(next);
    CHECK(next->servers[0].log == log_of({3}));

    st.servers[0].log = {2};
    st.servers[1].log = {1, 2};
    CHECK_FALSE(get_entries(st, 0, 1));  // last entry mismatch
    CHECK_FALSE(get_entries(st, 0, 0));  // s != t
    st.servers[0].log = {1};
    st.servers[0].role = Role::Primary;
    CHECK_FALSE(get_entries(st, 0, 1));  // primaries do not pull
}

TEST_CASE("rollback_entries removes a divergent last entry") {
    const auto b = ModelBounds::make(2, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].log = {1};
        s.servers[1].log = {2};
    });
    auto next = rollback_entries(st, 0, 1);
    REQUIRE(next);
    CHECK(next->servers[0].log.empty());

    st.servers[0].log = {1, 3};
    st.servers[1].log = {1, 3};
    CHECK_FALSE(rollback_entries(st, 0, 1));  // equal last terms

    st.servers[0].log = {};
    st.servers[1].log = {2};
    CHECK_FALSE(rollback_entries(st, 0, 1));  // nothing to roll back

    st.servers[0].log = {1};
    st.servers[1].log = {1, 2};
    CHECK_FALSE(rollback_entries(st, 0, 1));  // own log is a prefix: catch up instead

    st.servers[0].log = {1};
    st.servers[1].log = {2};
    st.servers[0].role = Role::Primary;
    CHECK_FALSE(rollback_entries(st, 0, 1));  // only secondaries roll back
}

TEST_CASE("commit_entry requires an immediately committed quorum") {
    const auto b = ModelBounds::make(2, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].role = Role::Primary;
        s.servers[0].term = 1;
        s.servers[0].config_term = 1;
        s.servers[0].log = {1};
        s.servers[1].term = 1;
        s.servers[1].log = {1};
    });
    auto next = commit_entry(st, 0, set_of({0, 1}));
    REQUIRE(next);
    CHECK(next->committed == std::vector<CommitRecord>{{1, 1}});

    auto stale = st;
    stale.servers[1].term = 2;
    CHECK_FALSE(commit_entry(stale, 0, set_of({0, 1})));  // member past the entry's term

    auto missing = st;
    missing.servers[1].log = {};
    CHECK_FALSE(commit_entry(missing, 0, set_of({0, 1})));  // member lacks the entry

    CHECK_FALSE(commit_entry(st, 0, set_of({0})));  // {n1} is no majority of {n1,n2}
    auto done = *next;
    CHECK_FALSE(commit_entry(done, 0, set_of({0, 1})));  // re-commit disabled
}

TEST_CASE("send_config installs strictly newer configs on secondaries") {
    const auto b = ModelBounds::make(2, 3, 3, 3);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].config = set_of({0});
        s.servers[0].config_version = 2;
        s.servers[0].config_term = 1;
        s.servers[1].config = set_of({0, 1});
        s.servers[1].config_version = 1;
        s.servers[1].config_term = 1;
    });
    auto next = send_config(st, 0, 1);
    REQUIRE(next);
    CHECK(next->servers[1].config == set_of({0}));
    CHECK(next->servers[1].stamp() == ConfigStamp{2, 1});
    CHECK(next->servers[1].term == st.servers[1].term);  // terms are UpdateTerms' job

    auto equal = st;
    equal.servers[0].config_version = 1;
    equal.servers[0].config = set_of({0, 1});
    CHECK_FALSE(send_config(equal, 0, 1));  // equal stamps

    auto primary = st;
    primary.servers[1].role = Role::Primary;
    primary.servers[1].term = 1;
    primary.servers[1].config_term = 1;
    CHECK_FALSE(send_config(primary, 0, 1));  // receiver must be secondary
}

TEST_CASE("reconfig needs config, term and oplog quorums plus overlap") {
    const auto b = ModelBounds::make(3, 3, 3, 3);
    auto st = make_state(b, [](ReplicaSetState& s) {
        for (auto& srv : s.servers) {
            srv.term = 1;
            srv.config_version = 1;
            srv.config_term = 1;
        }
        s.servers[0].role = Role::Primary;
    });

    auto next = reconfig(st, 0, set_of({0, 1}));
    REQUIRE(next);
    CHECK(next->servers[0].config == set_of({0, 1}));
    CHECK(next->servers[0].stamp() == ConfigStamp{2, 1});

    auto unpropagated = st;
    unpropagated.servers[1].config_version = 0;
    unpropagated.servers[2].config_version = 0;
    CHECK_FALSE(reconfig(unpropagated, 0, set_of({0, 1})));  // no quorum at the current stamp

    auto uncommitted = st;
    uncommitted.servers[0].log = {1};
    uncommitted.committed = {{1, 1}};
    CHECK_FALSE(reconfig(uncommitted, 0, set_of({0, 1})));  // committed entry not durable in any quorum

    CHECK_FALSE(reconfig(st, 0, set_of({1, 2})));     // primary must stay a member
    CHECK_FALSE(reconfig(st, 0, set_of({0, 1, 2})));  // m = current config
    CHECK_FALSE(reconfig(st, 1, set_of({0, 1})));     // not a primary
    CHECK_THROWS_AS(reconfig(st, 0, MemberSet(0xff)), std::invalid_argument);

    // Quorum overlap with the old config is required: {n1,n2,n3} -> {n1}
    // would let {n2,n3} and {n1} act independently.
    CHECK_FALSE(reconfig(st, 0, set_of({0})));

    // A member already past the primary's term disqualifies its quorums.
    auto superseded = st;
    superseded.servers[1].term = 2;
    superseded.servers[2].term = 2;
    CHECK_FALSE(reconfig(superseded, 0, set_of({0, 1})));
}

TEST_CASE("become_leader elects within the candidate's config") {
    const auto b = ModelBounds::make(3, 3, 3, 3);
    const auto st = initial_state(b);

    auto next = become_leader(st, 0, set_of({0, 1}));
    REQUIRE(next);
    CHECK(next->servers[0].role == Role::Primary);
    CHECK(next->servers[0].term == 1);
    CHECK(next->servers[0].stamp() == ConfigStamp{1, 1});
    CHECK(next->servers[1].role == Role::Secondary);
    CHECK(next->servers[1].term == 1);
    CHECK(next->servers[2] == st.servers[2]);  // non-voters untouched

    auto newer_log = st;
    newer_log.servers[1].log = {1};
    CHECK_FALSE(become_leader(newer_log, 0, set_of({0, 1})));  // voter log newer

    auto newer_config = st;
    newer_config.servers[1].config_version = 2;
    CHECK_FALSE(become_leader(newer_config, 0, set_of({0, 1})));  // voter config newer

    auto split = st;
    split.servers[1].term = 1;
    CHECK_FALSE(become_leader(split, 0, set_of({0, 1})));  // voter term too high

    // A candidate whose installed config comes from a newer term has to
    // learn that term before standing.
    auto ahead = st;
    ahead.servers[0].config_term = 1;
    CHECK_FALSE(become_leader(ahead, 0, set_of({0, 1})));

    CHECK_FALSE(become_leader(st, 0, set_of({1, 2})));  // candidate must vote for itself
    CHECK_FALSE(become_leader(st, 0, set_of({0})));     // not a majority
}

TEST_CASE("update_terms propagates newer terms and demotes") {
    const auto b = ModelBounds::make(2, 3, 3, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].term = 3;
        s.servers[1].term = 1;
        s.servers[1].role = Role::Primary;
        s.servers[1].config_term = 1;
    });
    auto next = update_terms(st, 0, 1);
    REQUIRE(next);
    CHECK(next->servers[1].term == 3);
    CHECK(next->servers[1].role == Role::Secondary);

    st.servers[0].term = 1;
    CHECK_FALSE(update_terms(st, 0, 1));  // equal terms
    st.servers[0].term = 0;
    st.servers[1].term = 2;
    CHECK_FALSE(update_terms(st, 0, 1));  // not newer
}

TEST_CASE("initial_state is the uniform bootstrap") {
    for (int n : {1, 3}) {
        const auto b = ModelBounds::make(n, 2, 1, 2);
        const auto st = initial_state(b);
        CHECK(st.server_count() == n);
        CHECK(st.committed.empty());
        for (const auto& s : st.servers) {
            CHECK(s.log.empty());
            CHECK(s.term == 0);
            CHECK(s.role == Role::Secondary);
            CHECK(s.config == b.universe());
            CHECK(s.stamp() == ConfigStamp{1, 0});
        }
        CHECK(type_ok(st, b));
    }
}

TEST_CASE("enumerate_transitions on the one-server bootstrap") {
    const auto b = ModelBounds::make(1, 1, 1, 1);
    const auto st = initial_state(b);
    auto ts = enumerate_transitions(st, b);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].first == ActionInstance::become_leader(0, set_of({0})));
    CHECK(ts[0].second.servers[0].role == Role::Primary);

    // Determinism: a second call yields the identical list.
    CHECK(enumerate_transitions(st, b) == ts);
}

TEST_CASE("enumerate_transitions returns empty when saturated") {
    const auto b = ModelBounds::make(1, 1, 1, 1);
    auto st = make_state(b, [](ReplicaSetState& s) {
        s.servers[0].role = Role::Primary;
        s.servers[0].term = 1;
        s.servers[0].config_term = 1;
        s.servers[0].log = {1};
        s.committed = {{1, 1}};
    });
    CHECK(enumerate_transitions(st, b).empty());

    auto bad = st;
    bad.servers[0].term = 7;
    CHECK_THROWS_AS(enumerate_transitions(bad, b), std::invalid_argument);
}


TEST_CASE("enumerate_transitions agrees with the naive guard oracle") {
    const auto b = ModelBounds::make(2, 2, 2, 2);
    int nonempty = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const ReplicaSetState st = random_state(b, seed);
        REQUIRE(type_ok(st, b));
        auto got = enumerate_transitions(st, b);
        std::vector<ActionInstance> got_actions;
        for (auto& [a, _] : got) got_actions.push_back(a);
        const auto want = oracle::naive_enabled_set(st, b);
        CHECK(got_actions == want);
        if (!want.empty()) nonempty++;
    }
    CHECK(nonempty > 100);  // the sample is not vacuous
}

TEST_CASE("transition properties: frame, purity, monotonicity") {
    const auto b = ModelBounds::make(3, 3, 2, 3);
    int transitions_seen = 0;
    for (std::uint64_t seed = 1000; seed < 1200; ++seed) {
        const ReplicaSetState st = random_state(b, seed);
        for (const auto& [action, next] : enumerate_transitions(st, b)) {
            transitions_seen++;
            CHECK(type_ok(next, b));

            // Purity: re-applying gives the identical successor.
            auto again = apply_action(st, action, {});
            REQUIRE(again);
            CHECK(*again == next);

            // committed grows monotonically.
            for (const auto& c : st.committed) CHECK(next.has_commit(c));

            for (int s = 0; s < st.server_count(); ++s) {
                // Terms never decrease.
                CHECK(next.servers[s].term >= st.servers[s].term);
                // Logs only change by appending or by removing the last
                // entry (RollbackEntries).
                const auto& before = st.servers[s].log;
                const auto& after = next.servers[s].log;
                if (action.kind == ActionKind::RollbackEntries && action.subject == s) {
                    CHECK(after.size() + 1 == before.size());
                    CHECK(std::equal(after.begin(), after.end(), before.begin()));
                } else {
                    CHECK(after.size() >= before.size());
                    CHECK(std::equal(before.begin(), before.end(), after.begin()));
                }
            }

            // Frame: untouched servers are bit-identical.
            for (int s = 0; s < st.server_count(); ++s) {
                const bool touched =
                    s == action.subject || (action.uses_peer() && s == action.peer) ||
                    (action.uses_quorum() && action.quorum.contains(static_cast<ServerId>(s)));
                if (!touched) CHECK(next.servers[s] == st.servers[s]);
            }
            if (action.kind != ActionKind::CommitEntry) CHECK(next.committed == st.committed);
        }
    }
    CHECK(transitions_seen > 500);
}
