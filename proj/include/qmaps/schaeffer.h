#pragma once

#include <cstdint>
#include <vector>

#include "qmaps/map_core.h"
#include "qmaps/trees.h"

namespace qmaps {

inline constexpr std::uint32_t kToPointed = 0xFFFFFFFFu;

/// One corner of the tree's contour, with the corner its arc points to.
struct Corner {
    NodeId node;
    int label;
    /// Index of the successor corner, or kToPointed for label-1 corners.
    std::uint32_t successor;
};

/// Corners 0..2n-1 in contour order. The successor of a corner with label l
/// is the next corner, cyclically, with label l-1; label-1 corners point to
/// the extra vertex.
std::vector<Corner> corner_sequence(const WellLabeledTree& t);

/// Tree -> quadrangulation.
///
/// Half-edge layout of the result: edge k (half-edges 2k, 2k+1) is the arc
/// drawn from contour corner k, with 2k leaving the tree vertex at that
/// corner. The root is the reverse half-edge of the first arc that reaches
/// the pointed vertex, so for root label 1 it is 2*0+1 and its tip is the
/// tree root. Labels need only be positive with minimum 1.
/// Throws Error{InvariantViolation} if the output fails quadrangulation
/// checks (cannot happen for valid input).
Quadrangulation forward(const WellLabeledTree& t);

/// Map vertex visited at contour time i (0 <= i <= 2n) for a map produced by
/// forward(). Throws Error{IndexOutOfRange}.
VertexId corner_vertex(const Quadrangulation& q, std::size_t i);

/// Tree edges and arcs drawn together (6n half-edges, 3n edges). Arc edge k
/// keeps half-edges 2k, 2k+1; tree edge to preorder node w uses 4n+2(w-1)
/// (from the parent) and 4n+2(w-1)+1.
CombinatorialMap forward_overlay(const WellLabeledTree& t);

/// Quadrangulation -> tree. Labels are graph distances from the pointed
/// vertex; each face contributes one tree edge chosen from its label pattern.
WellLabeledTree reverse(const Quadrangulation& q);

/// Graph distances from the pointed vertex, as labels per map vertex.
std::vector<int> distance_labels(const Quadrangulation& q);

}  // namespace qmaps
