#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmaps/map_core.h"

namespace qmaps {

using NodeIndex = std::uint32_t;

/// Position of a mesh node in one of the charts it belongs to: grid point
/// (i, j, k) / m of the unit cube of face `face`.
struct ChartPoint {
    FaceId face;
    std::uint32_t i, j, k;
};

struct MeshArc {
    NodeIndex to;
    double length;
};

/// Discretized glued-cube surface of a quadrangulation.
///
/// Every face f gets a copy of the unit cube with its bottom removed. Its
/// bottom boundary is parameterized along the face half-edges h1..h4 (in
/// traversal order, starting at face(f)[0]) by
///   c_h1(t) = (t,0,0), c_h2(t) = (1,t,0), c_h3(t) = (1-t,1,0), c_h4(t) = (0,1-t,0)
/// and c_h(t) is identified with c_opposite(h)(1-t). The five squares of each
/// cube are gridded at spacing 1/m; mesh edges are the grid axis segments and
/// both diagonals of every grid cell, weighted by Euclidean length.
///
/// Node numbering: map vertex v is node v; the m-1 interior subdivision
/// points of each map edge follow; chart-interior nodes come last.
class MeshedSurface {
public:
    /// Throws Error{ResolutionZero} for m = 0.
    static MeshedSurface build(const Quadrangulation& q, unsigned m);

    unsigned resolution() const { return m_; }
    std::size_t face_count() const { return face_count_; }
    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t node_count() const { return offsets_.size() - 1; }
    /// Undirected mesh edges including diagonals.
    std::size_t edge_count() const { return targets_.size() / 2; }
    /// Axis-parallel mesh edges, the 1-cells of the square cell complex.
    std::size_t axis_edge_count() const { return axis_edges_; }
    std::size_t cell_count() const { return 5 * face_count_ * m_ * m_; }
    /// nodes - axis edges + square cells.
    long euler_characteristic() const;

    NodeIndex vertex_node(VertexId v) const { return v; }
    /// Node at c_h(s/m), 0 <= s <= m.
    NodeIndex boundary_node(HalfEdge h, unsigned s) const;
    /// Throws Error{IndexOutOfRange} if (i, j, k) is not a grid point of the
    /// emptied cube of face f.
    NodeIndex node_at(FaceId f, unsigned i, unsigned j, unsigned k) const;
    /// Nodes belonging to the chart of face f.
    std::vector<NodeIndex> chart_nodes(FaceId f) const;
    /// One chart position for the node (the first one met during the build).
    const ChartPoint& position(NodeIndex node) const { return positions_[node]; }

    std::span<const MeshArc> neighbours(NodeIndex node) const {
        return {targets_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
    }

private:
    std::size_t grid_index(unsigned i, unsigned j, unsigned k) const {
        return (static_cast<std::size_t>(i) * (m_ + 1) + j) * (m_ + 1) + k;
    }

    unsigned m_ = 0;
    std::size_t face_count_ = 0;
    std::size_t vertex_count_ = 0;
    std::size_t axis_edges_ = 0;
    std::vector<HalfEdge> opposite_;
    std::vector<VertexId> origin_;
    std::vector<std::uint32_t> edge_index_;
    std::vector<NodeIndex> chart_grid_;  // per face, (m+1)^3 entries
    std::vector<ChartPoint> positions_;
    std::vector<std::size_t> offsets_;
    std::vector<MeshArc> targets_;
};

inline MeshedSurface build_mesh(const Quadrangulation& q, unsigned m) { return MeshedSurface::build(q, m); }

/// Shortest-path lengths from `source` in the weighted mesh.
std::vector<double> mesh_distances(const MeshedSurface& s, NodeIndex source);
double mesh_distance(const MeshedSurface& s, NodeIndex a, NodeIndex b);

/// Max |mesh distance - graph distance| over all vertex pairs.
double verify_vertex_isometry(const Quadrangulation& q, const MeshedSurface& s, unsigned threads = 0);

struct DensityReport {
    /// Max over nodes of the distance to the nearest map vertex.
    double density_radius = 0;
    /// Half the distortion of the correspondence pairing each node with a
    /// nearest map vertex.
    double gh_upper = 0;
    /// Nearest map vertex of every node.
    std::vector<VertexId> nearest;
    /// Distance from every node to its nearest map vertex.
    std::vector<double> nearest_distance;
};

DensityReport verify_density_and_gh(const Quadrangulation& q, const MeshedSurface& s, unsigned threads = 0);

/// OFF-like text: "QMESH", then "<nodes> <edges> <m>", one line per node
/// "face x y z" (chart coordinates), one line per edge "a b length".
std::string export_mesh(const MeshedSurface& s);

struct SurfaceReport {
    std::size_t n = 0;
    unsigned m = 0;
    double max_isometry_error = 0;
    double density_radius = 0;
    double gh_upper = 0;
};

std::string surface_report_csv(std::span<const SurfaceReport> rows);

}  // namespace qmaps
