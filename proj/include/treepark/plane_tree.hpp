#pragma once

// Rooted plane trees stored as flat preorder arrays. Vertex 0 is the root and
// parent[i] < i for every non-root vertex, which lets most algorithms run as
// single array sweeps instead of pointer chasing.
//
// The canonical interchange form is the preorder child-count sequence
// ("code"): tree <-> code is a bijection, and the serialized form is the code
// as space-separated integers on one newline-terminated line, e.g. "2 0 1 0".

#include <cstdint>
#include <vector>
#include <string>
#include <sstream>
#include <stdexcept>

namespace treepark {

class PlaneTree {
public:
    PlaneTree() = default;

    // Build from a preorder child-count sequence. Throws if the sequence is
    // not the code of a single tree.
    static PlaneTree from_code(const std::vector<std::uint32_t>& code) {
        const std::size_t n = code.size();
        if (n == 0) throw std::invalid_argument("PlaneTree: empty code");
        PlaneTree t;
        t.parent_.assign(n, -1);
        t.child_off_.assign(n + 1, 0);
        t.child_list_.assign(n - 1, 0);
        // prefix the offsets
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            t.child_off_[i] = static_cast<std::int32_t>(total);
            total += code[i];
        }
        t.child_off_[n] = static_cast<std::int32_t>(total);
        if (total != n - 1)
            throw std::invalid_argument("PlaneTree: child counts do not sum to n-1");
        // preorder walk with an explicit stack of (vertex, children still open)
        std::vector<std::pair<std::int32_t, std::uint32_t>> stack;
        stack.reserve(64);
        std::vector<std::uint32_t> filled(n, 0);
        stack.emplace_back(0, code[0]);
        for (std::size_t i = 1; i < n; ++i) {
            while (!stack.empty() && stack.back().second == 0) stack.pop_back();
            if (stack.empty())
                throw std::invalid_argument("PlaneTree: code terminates early");
            auto& top = stack.back();
            const std::int32_t p = top.first;
            top.second--;
            t.parent_[i] = p;
            t.child_list_[t.child_off_[p] + filled[p]] = static_cast<std::int32_t>(i);
            filled[p]++;
            stack.emplace_back(static_cast<std::int32_t>(i), code[i]);
        }
        return t;
    }

    std::size_t size() const { return parent_.size(); }
    std::int32_t parent(std::size_t v) const { return parent_[v]; }
    std::uint32_t child_count(std::size_t v) const {
        return static_cast<std::uint32_t>(child_off_[v + 1] - child_off_[v]);
    }
    std::int32_t child(std::size_t v, std::uint32_t i) const {
        return child_list_[child_off_[v] + i];
    }

    // preorder child counts; vertex indices are already preorder
    std::vector<std::uint32_t> code() const {
        std::vector<std::uint32_t> c(size());
        for (std::size_t v = 0; v < size(); ++v) c[v] = child_count(v);
        return c;
    }

    bool operator==(const PlaneTree& other) const {
        return code() == other.code();
    }
    bool operator!=(const PlaneTree& other) const { return !(*this == other); }

private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int32_t> child_off_;
    std::vector<std::int32_t> child_list_;
};

inline std::string serialize_code(const std::vector<std::uint32_t>& code) {
    std::string out;
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(code[i]);
    }
    out += '\n';
    return out;
}

inline std::string serialize_tree(const PlaneTree& t) {
    return serialize_code(t.code());
}

inline PlaneTree parse_tree(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::uint32_t> code;
    std::uint64_t k;
    while (in >> k) code.push_back(static_cast<std::uint32_t>(k));
    return PlaneTree::from_code(code);
}

// Binary trees for the rotation correspondence. Node 0 is the root when the
// tree is nonempty; n() == 0 is the empty tree (image of the one-vertex
// plane tree). left/right hold node indices or -1.
class BinaryTree {
public:
    BinaryTree() = default;
    explicit BinaryTree(std::size_t n) : left_(n, -1), right_(n, -1) {}

    std::size_t size() const { return left_.size(); }
    std::int32_t left(std::size_t v) const { return left_[v]; }
    std::int32_t right(std::size_t v) const { return right_[v]; }
    void set_left(std::size_t v, std::int32_t c) { left_[v] = c; }
    void set_right(std::size_t v, std::int32_t c) { right_[v] = c; }

    // canonical structural form: preorder walk emitting (has-left, has-right)
    // bits; relabels away the node numbering so equality is shape equality
    std::string shape_key() const {
        std::string key;
        if (size() == 0) return key;
        std::vector<std::int32_t> stack{0};
        while (!stack.empty()) {
            std::int32_t v = stack.back();
            stack.pop_back();
            key += left_[v] >= 0 ? 'L' : 'l';
            key += right_[v] >= 0 ? 'R' : 'r';
            if (right_[v] >= 0) stack.push_back(right_[v]);
            if (left_[v] >= 0) stack.push_back(left_[v]);
        }
        return key;
    }

    bool operator==(const BinaryTree& other) const {
        return shape_key() == other.shape_key();
    }
    bool operator!=(const BinaryTree& other) const { return !(*this == other); }

private:
    std::vector<std::int32_t> left_;
    std::vector<std::int32_t> right_;
};

}  // namespace treepark
