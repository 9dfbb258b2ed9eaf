#pragma once

#include <vector>

#include "mrr/types.hpp"

namespace mrr {

// All majority quorums of a member set: every q with 2*|q| > |members|, in
// binary-counter (ascending mask) order. Throws std::invalid_argument for an
// empty member set.
std::vector<MemberSet> majority_quorums(MemberSet members);

// Same, but an empty member set yields no quorums instead of an error. Used
// by guard and predicate evaluation, where an empty config simply disables
// everything quantified over its quorums.
std::vector<MemberSet> majority_quorums_or_none(MemberSet members);

// True when every majority quorum of a intersects every majority quorum of b.
// Vacuously true if either side has no quorums.
bool quorums_overlap(MemberSet a, MemberSet b);

// Every non-empty subset of the universe, ascending mask order.
std::vector<MemberSet> nonempty_subsets(MemberSet universe);

}  // namespace mrr
