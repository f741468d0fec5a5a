#pragma once

// Exhaustive enumeration of plane trees for the small-n oracles, plus exact
// Catalan counts. The number of plane trees on n vertices is the Catalan
// number C_{n-1}, which grows fast, so enumeration is gated at n <= 12.

#include <cstdint>
#include <vector>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "plane_tree.hpp"

namespace treepark {

using BigInt = boost::multiprecision::cpp_int;

// C_k = binom(2k, k)/(k+1), exact. C_{k+1} = C_k * 2(2k+1)/(k+2) stays
// integral at every step.
inline BigInt catalan(std::uint32_t k) {
    BigInt c = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        c *= 2 * (2 * i + 1);
        c /= i + 2;
    }
    return c;
}

namespace detail {

inline void enumerate_codes(std::uint32_t n, std::vector<std::uint32_t>& prefix,
                            std::uint32_t placed, std::uint32_t open,
                            std::vector<std::vector<std::uint32_t>>& out) {
    if (placed == n) {
        out.push_back(prefix);
        return;
    }
    const std::uint32_t remaining = n - placed;  // vertices still to emit, >= 1
    // after emitting a vertex with k children the open-slot count becomes
    // open - 1 + k; the remaining - 1 vertices must fill exactly those slots,
    // one nonempty subtree per slot
    for (std::uint32_t k = 0; k + placed < n; ++k) {
        const std::uint32_t open_after = open - 1 + k;
        const std::uint32_t rem_after = remaining - 1;
        if (rem_after == 0 ? open_after != 0 : (open_after == 0 || open_after > rem_after))
            continue;
        prefix.push_back(k);
        enumerate_codes(n, prefix, placed + 1, open_after, out);
        prefix.pop_back();
    }
}

}  // namespace detail

// All plane trees on n vertices in lexicographic code order.
inline std::vector<PlaneTree> enumerate_plane_trees(std::uint32_t n) {
    if (n == 0 || n > 12)
        throw std::invalid_argument("enumerate_plane_trees: n must be in [1, 12]");
    std::vector<std::vector<std::uint32_t>> codes;
    std::vector<std::uint32_t> prefix;
    prefix.reserve(n);
    detail::enumerate_codes(n, prefix, 0, 1, codes);
    std::vector<PlaneTree> trees;
    trees.reserve(codes.size());
    for (const auto& c : codes) trees.push_back(PlaneTree::from_code(c));
    return trees;
}

}  // namespace treepark
