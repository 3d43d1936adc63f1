#include "qmaps/schaeffer.h"

#include <algorithm>
#include <deque>

#include <fmt/core.h>

#include "qmaps/error.h"

namespace qmaps {

namespace {

struct ArcLayout {
    std::vector<Corner> corners;
    /// Sources of arcs ending at each corner, nearest (backwards) first.
    std::vector<std::vector<std::uint32_t>> incoming;
    std::uint32_t root_corner = 0;
};

ArcLayout layout_arcs(const WellLabeledTree& t) {
    const std::size_t corners = 2 * t.size();
    if (corners == 0) throw Error(ErrorCode::EmptyTree, "tree has no edges");
    const auto x = contour_nodes(t.tree);
    ArcLayout out;
    out.corners.resize(corners);
    int max_label = 0;
    for (std::size_t k = 0; k < corners; ++k) {
        const int label = t.labels[x[k]];
        if (label < 1)
            throw Error(ErrorCode::InvariantViolation, fmt::format("label {} at corner {}", label, k));
        out.corners[k] = Corner{x[k], label, kToPointed};
        max_label = std::max(max_label, label);
    }
    out.incoming.resize(corners);

    // Two laps around the contour; pending[l] holds corners of label l still
    // waiting for a corner of label l-1, in increasing time.
    std::vector<std::vector<std::uint32_t>> pending(static_cast<std::size_t>(max_label) + 2);
    for (std::size_t lap = 0; lap < 2; ++lap) {
        for (std::uint32_t c = 0; c < corners; ++c) {
            const int label = out.corners[c].label;
            auto& waiting = pending[static_cast<std::size_t>(label) + 1];
            for (auto it = waiting.rbegin(); it != waiting.rend(); ++it) {
                out.corners[*it].successor = c;
                out.incoming[c].push_back(*it);
            }
            waiting.clear();
            if (lap == 0 && label > 1) pending[static_cast<std::size_t>(label)].push_back(c);
        }
    }
    bool has_one = false;
    for (std::uint32_t c = 0; c < corners; ++c) {
        if (out.corners[c].label == 1) {
            if (!has_one) out.root_corner = c;
            has_one = true;
        } else if (out.corners[c].successor == kToPointed) {
            throw Error(ErrorCode::InvariantViolation, fmt::format("corner {} has no successor", c));
        }
    }
    if (!has_one) throw Error(ErrorCode::InvariantViolation, "no corner with label 1");
    return out;
}

CombinatorialMap build_map(const WellLabeledTree& t, bool with_tree) {
    const ArcLayout arcs = layout_arcs(t);
    const std::size_t corners = arcs.corners.size();
    const auto tree_base = static_cast<HalfEdge>(2 * corners);
    const std::size_t half_edges = 2 * corners + (with_tree ? corners : 0);

    std::vector<HalfEdge> opposite(half_edges);
    for (HalfEdge h = 0; h < half_edges; ++h) opposite[h] = h ^ 1u;

    // Corners of each node in time order equal its counterclockwise order.
    std::vector<std::vector<std::uint32_t>> node_corners(t.tree.node_count());
    for (std::uint32_t c = 0; c < corners; ++c) node_corners[arcs.corners[c].node].push_back(c);

    auto tree_half_edge = [&](NodeId from, NodeId to) -> HalfEdge {
        // Edge indexed by its child end; even half-edge points down the tree.
        if (t.tree.parent(to) == from) return tree_base + 2 * (to - 1);
        return tree_base + 2 * (from - 1) + 1;
    };

    std::vector<HalfEdge> rotation(half_edges);
    std::vector<HalfEdge> cycle;
    for (NodeId v = 0; v < t.tree.node_count(); ++v) {
        cycle.clear();
        for (std::uint32_t c : node_corners[v]) {
            if (with_tree) {
                const std::uint32_t before = static_cast<std::uint32_t>((c + corners - 1) % corners);
                cycle.push_back(tree_half_edge(v, arcs.corners[before].node));
            }
            for (std::uint32_t source : arcs.incoming[c]) cycle.push_back(2 * source + 1);
            cycle.push_back(2 * c);
        }
        for (std::size_t i = 0; i < cycle.size(); ++i) rotation[cycle[i]] = cycle[(i + 1) % cycle.size()];
    }
    // The pointed vertex sees label-1 corners in reverse contour order.
    cycle.clear();
    for (std::uint32_t c = static_cast<std::uint32_t>(corners); c-- > 0;) {
        if (arcs.corners[c].label == 1) cycle.push_back(2 * c + 1);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) rotation[cycle[i]] = cycle[(i + 1) % cycle.size()];

    return CombinatorialMap::build(std::move(opposite), std::move(rotation), 2 * arcs.root_corner + 1);
}

}  // namespace

std::vector<Corner> corner_sequence(const WellLabeledTree& t) {
    return layout_arcs(t).corners;
}

Quadrangulation forward(const WellLabeledTree& t) {
    auto map = build_map(t, false);
    try {
        return Quadrangulation::from_map(std::move(map));
    } catch (const Error& e) {
        throw Error(ErrorCode::InvariantViolation, fmt::format("forward produced a bad map: {}", e.what()));
    }
}

CombinatorialMap forward_overlay(const WellLabeledTree& t) {
    return build_map(t, true);
}

VertexId corner_vertex(const Quadrangulation& q, std::size_t i) {
    const std::size_t corners = q.map().half_edge_count() / 2;
    if (i > corners) throw Error(ErrorCode::IndexOutOfRange, fmt::format("contour time {} > {}", i, corners));
    return q.map().origin(static_cast<HalfEdge>(2 * (i % corners)));
}

std::vector<int> distance_labels(const Quadrangulation& q) {
    const auto& m = q.map();
    std::vector<int> dist(m.vertex_count(), -1);
    std::deque<VertexId> queue{q.pointed_vertex()};
    dist[q.pointed_vertex()] = 0;
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        const HalfEdge start = m.vertex_half_edge(v);
        HalfEdge h = start;
        do {
            VertexId w = m.target(h);
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            h = m.next_at_vertex(h);
        } while (h != start);
    }
    return dist;
}

WellLabeledTree reverse(const Quadrangulation& q) {
    const auto& m = q.map();
    const auto labels = distance_labels(q);
    constexpr VertexId kNone = 0xFFFFFFFFu;

    // attached[d]: tree neighbour sitting in the corner just before half-edge
    // d in the counterclockwise rotation at origin(d).
    std::vector<VertexId> attached(m.half_edge_count(), kNone);
    std::size_t tree_edges = 0;
    for (FaceId f = 0; f < m.face_count(); ++f) {
        const auto h = m.face(f);
        int l[4];
        for (int i = 0; i < 4; ++i) l[i] = labels[m.origin(h[i])];
        const int top = *std::max_element(l, l + 4);
        int first = -1, second = -1;
        for (int i = 0; i < 4; ++i) {
            if (l[i] != top) continue;
            (first < 0 ? first : second) = i;
        }
        int a, b;
        if (second >= 0) {
            // (l, l+1, l, l+1): join the two maximal corners.
            a = first;
            b = second;
        } else {
            // (l, l+1, l+2, l+1): join the maximum to its predecessor.
            a = first;
            b = (first + 3) % 4;
        }
        const VertexId va = m.origin(h[a]);
        const VertexId vb = m.origin(h[b]);
        if (va == vb || attached[h[a]] != kNone || attached[h[b]] != kNone)
            throw Error(ErrorCode::NotQuadrangulation, fmt::format("face {} has a degenerate label pattern", f));
        attached[h[a]] = vb;
        attached[h[b]] = va;
        ++tree_edges;
    }

    const VertexId star = q.pointed_vertex();
    const VertexId root = m.target(m.root());

    // Counterclockwise tree neighbours of v, starting after half-edge `from`.
    auto neighbours = [&](HalfEdge from) {
        std::vector<VertexId> out;
        HalfEdge d = m.next_at_vertex(from);
        for (;;) {
            if (attached[d] != kNone) out.push_back(attached[d]);
            if (d == from) break;
            d = m.next_at_vertex(d);
        }
        return out;
    };

    std::vector<bool> up;
    up.reserve(2 * tree_edges);
    std::vector<int> tree_labels;
    tree_labels.reserve(tree_edges + 1);
    std::vector<bool> visited(m.vertex_count(), false);

    struct Frame {
        VertexId vertex;
        std::vector<VertexId> children;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({root, neighbours(m.opposite(m.root()))});
    visited[root] = true;
    tree_labels.push_back(labels[root]);
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next == top.children.size()) {
            stack.pop_back();
            if (!stack.empty()) up.push_back(false);
            continue;
        }
        const VertexId child = top.children[top.next++];
        const VertexId parent = top.vertex;
        if (child == star || visited[child])
            throw Error(ErrorCode::NotQuadrangulation, "recovered edges do not form a tree");
        visited[child] = true;
        up.push_back(true);
        tree_labels.push_back(labels[child]);

        // Rotate so the parent comes first; the rest are the children.
        auto around = neighbours(m.vertex_half_edge(child));
        auto pos = std::find(around.begin(), around.end(), parent);
        if (pos == around.end())
            throw Error(ErrorCode::NotQuadrangulation, "tree edge recorded on one side only");
        std::rotate(around.begin(), pos, around.end());
        around.erase(around.begin());
        stack.push_back({child, std::move(around)});
    }
    if (up.size() != 2 * tree_edges || tree_labels.size() != m.vertex_count() - 1)
        throw Error(ErrorCode::NotQuadrangulation, "recovered edges do not span the map");

    WellLabeledTree t{PlaneTree::from_dyck(std::move(up)), std::move(tree_labels)};
    return t;
}

}  // namespace qmaps
