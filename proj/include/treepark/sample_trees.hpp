#pragma once

// Random tree generation.
//
// sample_ggw: Galton-Watson tree with Geometric(1/2) offspring (mass 2^-(i+1)
// on i = 0, 1, ...), critical with variance 2. Generated directly in preorder:
// the child counts along a depth-first exploration are i.i.d. draws stopped
// when the open-slot count hits zero. Every n-vertex plane tree comes out
// with probability 2^(1-2n), so conditioning on the size being n is the
// uniform distribution -- that fact is what the uniform sampler exploits in
// reverse, and what the tests check.
//
// sample_uniform_plane_tree: exact uniform n-vertex tree in O(n) by the cycle
// lemma. Shuffle n-1 up-steps and n down-steps, rotate to the unique cyclic
// shift whose partial sums stay nonnegative until the final step, then read
// off the run lengths of up-steps before each down-step as preorder child
// counts.

#include <cstdint>
#include <optional>
#include <vector>

#include "plane_tree.hpp"
#include "rng.hpp"

namespace treepark {

// Draw the preorder child-count code of one GGW(1/2) tree into `code`
// (cleared first). Returns false and leaves a partial code if the tree would
// exceed size_cap vertices.
inline bool sample_ggw_code(Rng& rng, std::vector<std::uint32_t>& code,
                            std::uint64_t size_cap) {
    code.clear();
    std::uint64_t open = 1;
    while (open > 0) {
        if (code.size() >= size_cap) return false;
        const std::uint32_t k = rng.geometric_half();
        code.push_back(k);
        open += k;
        open -= 1;
    }
    return true;
}

// nullopt means the size cap was hit; a capped draw is never returned as a
// truncated tree.
inline std::optional<PlaneTree> sample_ggw(Rng& rng, std::uint64_t size_cap = 10000000) {
    std::vector<std::uint32_t> code;
    if (!sample_ggw_code(rng, code, size_cap)) return std::nullopt;
    return PlaneTree::from_code(code);
}

namespace detail {

// steps: +1/-1 sequence with total sum -1. Returns the start index of the
// unique rotation whose partial sums stay >= 0 before the last step. That is
// the position right after the first time the prefix minimum is attained.
inline std::size_t cycle_lemma_start(const std::vector<std::int8_t>& steps) {
    std::int64_t sum = 0;
    std::int64_t min = 0;  // the total is -1, so the true minimum is negative
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        sum += steps[i];
        if (sum < min) {
            min = sum;
            argmin = i;
        }
    }
    return (argmin + 1) % steps.size();
}

}  // namespace detail

// Uniform preorder code on n-vertex plane trees, written into `code`.
inline void sample_uniform_code(Rng& rng, std::uint32_t n,
                                std::vector<std::uint32_t>& code,
                                std::vector<std::int8_t>& step_buf) {
    code.clear();
    if (n == 1) {
        code.push_back(0);
        return;
    }
    const std::size_t len = 2 * static_cast<std::size_t>(n) - 1;
    step_buf.assign(len, -1);
    for (std::size_t i = 0; i + 1 < n; ++i) step_buf[i] = 1;
    // Fisher-Yates
    for (std::size_t i = len - 1; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(step_buf[i], step_buf[j]);
    }
    const std::size_t start = detail::cycle_lemma_start(step_buf);
    // decode: run of ups then one down per vertex, in preorder
    code.reserve(n);
    std::uint32_t ups = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const std::int8_t s = step_buf[(start + i) % len];
        if (s > 0) {
            ++ups;
        } else {
            code.push_back(ups);
            ups = 0;
        }
    }
}

inline PlaneTree sample_uniform_plane_tree(Rng& rng, std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("sample_uniform_plane_tree: n >= 1");
    std::vector<std::uint32_t> code;
    std::vector<std::int8_t> steps;
    sample_uniform_code(rng, n, code, steps);
    return PlaneTree::from_code(code);
}

}  // namespace treepark
