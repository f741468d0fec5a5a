#pragma once

// The rotation correspondence: a bijection from plane trees on n vertices to
// binary trees on n - 1 nodes. First-child edges become left edges, adjacent
// sibling pairs become right edges (later sibling hangs right of the earlier),
// and the old root disappears. Its inverse reads left spines back as child
// lists.

#include <cstdint>
#include <vector>
#include <stdexcept>

#include "plane_tree.hpp"

namespace treepark {

inline BinaryTree rotation_to_binary(const PlaneTree& t) {
    const std::size_t n = t.size();
    BinaryTree b(n - 1);  // node v-1 stands for plane vertex v >= 1
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint32_t k = t.child_count(v);
        if (k == 0) continue;
        if (v != 0) {
            // first child hangs left of its parent
            b.set_left(v - 1, t.child(v, 0) - 1);
        }
        // each later sibling hangs right of the one before it; this covers the
        // root's children too, whose chain starts at the binary root
        for (std::uint32_t i = 0; i + 1 < k; ++i)
            b.set_right(t.child(v, i) - 1, t.child(v, i + 1) - 1);
    }
    return b;
}

inline PlaneTree rotation_from_binary(const BinaryTree& b) {
    const std::size_t m = b.size();
    std::vector<std::uint32_t> code(m + 1, 0);
    if (m == 0) return PlaneTree::from_code(code);

    // Plane children of a vertex are a left child plus the chain of right
    // descendants under it; the root's children are the chain from binary
    // node 0. Emit the code in preorder with an explicit stack.
    //
    // chain_length(x): 1 + number of right links walked from x.
    // The preorder position of plane vertices follows the binary preorder
    // visiting left chains first, so walk nodes depth-first: at each plane
    // vertex coming from binary node x, the child count is the chain length
    // under left(x) (or under node 0 for the root).
    std::vector<std::int32_t> stack;  // binary nodes whose plane vertex is next to emit
    auto chain = [&](std::int32_t head, std::vector<std::int32_t>& out) {
        for (std::int32_t x = head; x >= 0; x = b.right(x)) out.push_back(x);
    };

    std::vector<std::int32_t> tmp;
    chain(0, tmp);
    code[0] = static_cast<std::uint32_t>(tmp.size());
    for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) stack.push_back(*it);

    std::size_t pos = 1;
    while (!stack.empty()) {
        const std::int32_t x = stack.back();
        stack.pop_back();
        tmp.clear();
        chain(b.left(x), tmp);
        code[pos++] = static_cast<std::uint32_t>(tmp.size());
        for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) stack.push_back(*it);
    }
    if (pos != m + 1)
        throw std::invalid_argument("rotation_from_binary: disconnected binary tree");
    return PlaneTree::from_code(code);
}

}  // namespace treepark
