#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmaps {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoParent = 0xFFFFFFFFu;

/// Rooted plane tree. Nodes are numbered in preorder (root = 0), children
/// are kept in their planar left-to-right order.
class PlaneTree {
public:
    /// `up[i]` is true for an up-step of the Dyck word.
    /// Throws Error{MalformedInput} for an unbalanced word.
    static PlaneTree from_dyck(std::vector<bool> up);
    /// Balanced parentheses, e.g. "(()())". Whitespace is not allowed.
    static PlaneTree from_parens(std::string_view word);

    std::size_t edge_count() const { return dyck_.size() / 2; }
    std::size_t node_count() const { return parent_.size(); }

    const std::vector<bool>& dyck() const { return dyck_; }
    std::string to_parens() const;

    NodeId parent(NodeId v) const { return parent_[v]; }
    std::uint32_t depth(NodeId v) const { return depth_[v]; }
    std::span<const NodeId> children(NodeId v) const {
        return {children_.data() + child_offsets_[v], child_offsets_[v + 1] - child_offsets_[v]};
    }
    /// Whether `a` is an ancestor of `b` (a node is its own ancestor).
    bool is_ancestor(NodeId a, NodeId b) const;

    bool operator==(const PlaneTree& other) const { return dyck_ == other.dyck_; }

private:
    std::vector<bool> dyck_;
    std::vector<NodeId> parent_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::size_t> child_offsets_;
    std::vector<NodeId> children_;
    std::vector<std::uint32_t> subtree_size_;
};

/// Plane tree with positive integer labels, |l(x) - l(y)| <= 1 along edges
/// and (for members of the bijection's domain) root label 1.
struct WellLabeledTree {
    PlaneTree tree;
    std::vector<int> labels;  // indexed by preorder node id

    std::size_t size() const { return tree.edge_count(); }
    int min_label() const;

    /// Throws Error{InvariantViolation} describing the first broken invariant.
    void validate(bool require_root_label_one = true) const;

    bool operator==(const WellLabeledTree& other) const = default;
};

/// Contour (Harris walk) and label processes, indices 0..2n.
struct ContourPair {
    std::size_t n = 0;
    std::vector<int> C;
    std::vector<int> L;

    bool operator==(const ContourPair& other) const = default;
};

enum class SamplingMode {
    /// Uniform on well-labeled trees: uniform tree and increments, rejected
    /// until every label is >= 1.
    ExactRejection,
    /// Uniform tree and increments, labels shifted to have minimum 1 and the
    /// tree re-rooted at the first minimal corner. Fast, not uniform on the
    /// well-labeled trees of size n.
    FreeShift,
};

std::string_view to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view text);

/// Catalan number C_n (exact for n <= 35).
std::uint64_t catalan(unsigned n);
/// 2 * 3^n * (2n)! / (n! (n+2)!), the number of well-labeled trees with n
/// edges and of rooted quadrangulations with n faces (exact for n <= 25).
std::uint64_t well_labeled_count(unsigned n);

/// Uniform over the Catalan(n) plane trees via the cycle lemma.
/// Throws Error{EmptyTree} for n = 0.
PlaneTree sample_plane_tree(std::size_t n, std::mt19937_64& rng);
PlaneTree sample_plane_tree(std::size_t n, std::uint64_t seed);

WellLabeledTree sample_well_labeled(std::size_t n, std::uint64_t seed, SamplingMode mode);

inline constexpr unsigned kMaxEnumerationSize = 8;

/// Calls `visit` once for every plane tree with n edges.
void enumerate_plane_trees(unsigned n, const std::function<void(const PlaneTree&)>& visit);
/// Calls `visit` once for every well-labeled tree (root label 1) with n
/// edges. Throws Error{SizeTooLarge} for n > kMaxEnumerationSize.
void enumerate_well_labeled(unsigned n, const std::function<void(const WellLabeledTree&)>& visit);
std::vector<WellLabeledTree> all_well_labeled(unsigned n);

/// Node visited at each contour time 0..2n.
std::vector<NodeId> contour_nodes(const PlaneTree& tree);
ContourPair contour_processes(const WellLabeledTree& t);
/// Inverse of contour_processes. Throws Error{MalformedInput} if (C, L) does
/// not encode a labeled tree.
WellLabeledTree from_contour(const ContourPair& pair);

/// Same labeled tree, re-rooted at contour corner `corner` (0 <= corner < 2n).
WellLabeledTree reroot(const WellLabeledTree& t, std::size_t corner);

/// Two-line text format: Dyck word in parentheses, then labels in preorder.
std::string to_text(const WellLabeledTree& t);
/// Throws Error{MalformedInput}.
WellLabeledTree parse_tree_text(std::string_view text, bool require_root_label_one = true);

/// Rows "i,C,L" with a header line.
std::string contour_csv(const ContourPair& pair);

}  // namespace qmaps
