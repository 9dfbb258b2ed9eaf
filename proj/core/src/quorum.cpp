#include "mrr/quorum.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace mrr {

std::vector<MemberSet> majority_quorums_or_none(MemberSet members) {
    std::vector<MemberSet> out;
    if (members.empty()) return out;
    const int n = members.size();
    // Walk all submasks in ascending order; cheap at the scopes we run.
    const std::uint32_t m = members.mask();
    for (std::uint32_t q = m;; q = (q - 1) & m) {
        if (q != 0 && 2 * std::popcount(q) > n) out.push_back(MemberSet(q));
        if (q == 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MemberSet> majority_quorums(MemberSet members) {
    if (members.empty()) throw std::invalid_argument("empty config");
    return majority_quorums_or_none(members);
}

bool quorums_overlap(MemberSet a, MemberSet b) {
    const auto qa = majority_quorums_or_none(a);
    const auto qb = majority_quorums_or_none(b);
    for (MemberSet x : qa) {
        for (MemberSet y : qb) {
            if (!x.intersects(y)) return false;
        }
    }
    return true;
}

std::vector<MemberSet> nonempty_subsets(MemberSet universe) {
    std::vector<MemberSet> out;
    const std::uint32_t m = universe.mask();
    out.reserve((1u << universe.size()) - 1);
    for (std::uint32_t x = 1; x <= m; ++x) {
        if ((x & ~m) == 0) out.push_back(MemberSet(x));
    }
    return out;
}

}  // namespace mrr
