#pragma once

#include <bit>
#include <compare>
#include <cstdint>

namespace mrr {

// Servers are small indices into ModelBounds::servers. Index order is the
// total order used everywhere for tie-breaking and canonical output.
using ServerId = std::uint8_t;

enum class Role : std::uint8_t { Secondary = 0, Primary = 1 };

constexpr const char* to_string(Role r) {
    return r == Role::Primary ? "Primary" : "Secondary";
}

// A set of servers, at most 32 wide, as a bitmask. Subset enumeration over
// masks in increasing numeric order gives the binary-counter order.
class MemberSet {
public:
    constexpr MemberSet() = default;
    constexpr explicit MemberSet(std::uint32_t mask) : mask_(mask) {}

    static constexpr MemberSet full(int count) {
        return MemberSet(count >= 32 ? ~0u : (1u << count) - 1u);
    }
    static constexpr MemberSet single(ServerId s) { return MemberSet(1u << s); }

    constexpr bool contains(ServerId s) const { return (mask_ >> s) & 1u; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool subset_of(MemberSet o) const { return (mask_ & ~o.mask_) == 0; }
    constexpr bool intersects(MemberSet o) const { return (mask_ & o.mask_) != 0; }
    constexpr MemberSet with(ServerId s) const { return MemberSet(mask_ | (1u << s)); }
    constexpr MemberSet without(ServerId s) const { return MemberSet(mask_ & ~(1u << s)); }
    constexpr std::uint32_t mask() const { return mask_; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
            f(static_cast<ServerId>(std::countr_zero(m)));
        }
    }

    friend constexpr auto operator<=>(const MemberSet&, const MemberSet&) = default;

private:
    std::uint32_t mask_ = 0;
};

}  // namespace mrr
