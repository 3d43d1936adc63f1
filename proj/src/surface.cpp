#include "qmaps/surface.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "qmaps/error.h"
#include "qmaps/metric.h"
#include "qmaps/parallel.h"

namespace qmaps {

namespace {

constexpr NodeIndex kNoNode = 0xFFFFFFFFu;

bool on_surface(unsigned m, unsigned i, unsigned j, unsigned k) {
    return i == 0 || i == m || j == 0 || j == m || k == m;
}

// Square q of the emptied cube, grid coordinates (a, b) -> (i, j, k).
std::array<unsigned, 3> square_point(int square, unsigned m, unsigned a, unsigned b) {
    switch (square) {
        case 0: return {a, 0, b};
        case 1: return {m, a, b};
        case 2: return {a, m, b};
        case 3: return {0, a, b};
        default: return {a, b, m};
    }
}

struct Edge {
    NodeIndex a, b;
    double length;
};

}  // namespace

MeshedSurface MeshedSurface::build(const Quadrangulation& q, unsigned m) {
    if (m == 0) throw Error(ErrorCode::ResolutionZero, "mesh resolution must be at least 1");
    const CombinatorialMap& map = q.map();
    MeshedSurface s;
    s.m_ = m;
    s.face_count_ = map.face_count();
    s.vertex_count_ = map.vertex_count();
    const std::size_t half_edges = map.half_edge_count();
    s.opposite_.assign(map.opposite_table().begin(), map.opposite_table().end());
    s.origin_.resize(half_edges);
    s.edge_index_.resize(half_edges);
    std::uint32_t edges = 0;
    for (HalfEdge h = 0; h < half_edges; ++h) {
        s.origin_[h] = map.origin(h);
        if (h < s.opposite_[h]) {
            s.edge_index_[h] = edges;
            s.edge_index_[s.opposite_[h]] = edges;
            ++edges;
        }
    }

    const std::size_t shared_nodes = s.vertex_count_ + static_cast<std::size_t>(edges) * (m - 1);
    s.positions_.resize(shared_nodes);
    std::vector<bool> placed(shared_nodes, false);
    const std::size_t grid = static_cast<std::size_t>(m + 1) * (m + 1) * (m + 1);
    s.chart_grid_.assign(s.face_count_ * grid, kNoNode);

    for (FaceId f = 0; f < s.face_count_; ++f) {
        const auto hs = map.face(f);
        NodeIndex* cells = s.chart_grid_.data() + f * grid;
        for (unsigned i = 0; i <= m; ++i) {
            for (unsigned j = 0; j <= m; ++j) {
                for (unsigned k = 0; k <= m; ++k) {
                    if (!on_surface(m, i, j, k)) continue;
                    NodeIndex node;
                    if (k == 0) {
                        if (j == 0) node = s.boundary_node(hs[0], i);
                        else if (i == m) node = s.boundary_node(hs[1], j);
                        else if (j == m) node = s.boundary_node(hs[2], m - i);
                        else node = s.boundary_node(hs[3], m - j);
                        if (!placed[node]) {
                            placed[node] = true;
                            s.positions_[node] = {f, i, j, k};
                        }
                    } else {
                        node = static_cast<NodeIndex>(s.positions_.size());
                        s.positions_.push_back({f, i, j, k});
                    }
                    cells[s.grid_index(i, j, k)] = node;
                }
            }
        }
    }

    const double unit = 1.0 / m;
    const double diagonal = std::sqrt(2.0) / m;
    std::vector<Edge> list;
    for (HalfEdge h = 0; h < half_edges; ++h) {
        if (h > s.opposite_[h]) continue;
        for (unsigned t = 0; t < m; ++t) list.push_back({s.boundary_node(h, t), s.boundary_node(h, t + 1), unit});
    }
    s.axis_edges_ = list.size();
    for (FaceId f = 0; f < s.face_count_; ++f) {
        const NodeIndex* cells = s.chart_grid_.data() + f * grid;
        std::set<std::pair<std::size_t, std::size_t>> axis;
        auto add_axis = [&](const std::array<unsigned, 3>& p, const std::array<unsigned, 3>& r) {
            if (p[2] == 0 && r[2] == 0) return;  // bottom boundary, added per map edge
            const std::size_t a = s.grid_index(p[0], p[1], p[2]);
            const std::size_t b = s.grid_index(r[0], r[1], r[2]);
            if (!axis.emplace(std::min(a, b), std::max(a, b)).second) return;
            list.push_back({cells[a], cells[b], unit});
        };
        auto add_diagonal = [&](const std::array<unsigned, 3>& p, const std::array<unsigned, 3>& r) {
            list.push_back({cells[s.grid_index(p[0], p[1], p[2])], cells[s.grid_index(r[0], r[1], r[2])], diagonal});
        };
        for (int square = 0; square < 5; ++square) {
            for (unsigned a = 0; a < m; ++a) {
                for (unsigned b = 0; b < m; ++b) {
                    const auto p00 = square_point(square, m, a, b);
                    const auto p10 = square_point(square, m, a + 1, b);
                    const auto p01 = square_point(square, m, a, b + 1);
                    const auto p11 = square_point(square, m, a + 1, b + 1);
                    add_axis(p00, p10);
                    add_axis(p00, p01);
                    add_axis(p10, p11);
                    add_axis(p01, p11);
                    add_diagonal(p00, p11);
                    add_diagonal(p10, p01);
                }
            }
        }
        s.axis_edges_ += axis.size();
    }

    const std::size_t nodes = s.positions_.size();
    s.offsets_.assign(nodes + 1, 0);
    for (const Edge& e : list) {
        ++s.offsets_[e.a + 1];
        ++s.offsets_[e.b + 1];
    }
    for (std::size_t v = 0; v < nodes; ++v) s.offsets_[v + 1] += s.offsets_[v];
    s.targets_.resize(2 * list.size());
    std::vector<std::size_t> fill(s.offsets_.begin(), s.offsets_.end() - 1);
    for (const Edge& e : list) {
        s.targets_[fill[e.a]++] = {e.b, e.length};
        s.targets_[fill[e.b]++] = {e.a, e.length};
    }
    return s;
}

long MeshedSurface::euler_characteristic() const {
    return static_cast<long>(node_count()) - static_cast<long>(axis_edge_count()) +
           static_cast<long>(cell_count());
}

NodeIndex MeshedSurface::boundary_node(HalfEdge h, unsigned s) const {
    if (h >= opposite_.size() || s > m_) {
        throw Error(ErrorCode::IndexOutOfRange, fmt::format("no boundary point c_{}({}/{})", h, s, m_));
    }
    if (s == 0) return origin_[h];
    if (s == m_) return origin_[opposite_[h]];
    const unsigned t = h < opposite_[h] ? s : m_ - s;
    return static_cast<NodeIndex>(vertex_count_ + static_cast<std::size_t>(edge_index_[h]) * (m_ - 1) + (t - 1));
}

NodeIndex MeshedSurface::node_at(FaceId f, unsigned i, unsigned j, unsigned k) const {
    if (f >= face_count_ || i > m_ || j > m_ || k > m_ || !on_surface(m_, i, j, k)) {
        throw Error(ErrorCode::IndexOutOfRange,
                    fmt::format("({}, {}, {}) is not a grid point of chart {} at m = {}", i, j, k, f, m_));
    }
    const std::size_t grid = static_cast<std::size_t>(m_ + 1) * (m_ + 1) * (m_ + 1);
    return chart_grid_[f * grid + grid_index(i, j, k)];
}

std::vector<NodeIndex> MeshedSurface::chart_nodes(FaceId f) const {
    if (f >= face_count_) throw Error(ErrorCode::IndexOutOfRange, fmt::format("face {} out of range", f));
    const std::size_t grid = static_cast<std::size_t>(m_ + 1) * (m_ + 1) * (m_ + 1);
    std::vector<NodeIndex> out;
    for (std::size_t g = 0; g < grid; ++g) {
        if (chart_grid_[f * grid + g] != kNoNode) out.push_back(chart_grid_[f * grid + g]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

using QueueEntry = std::pair<double, NodeIndex>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

// Dijkstra from the given sources; label[x] records which source reached x.
std::vector<double> dijkstra(const MeshedSurface& s, std::span<const NodeIndex> sources,
                             std::vector<NodeIndex>* label, NodeIndex stop_at = kNoNode) {
    std::vector<double> dist(s.node_count(), std::numeric_limits<double>::infinity());
    if (label) label->assign(s.node_count(), kNoNode);
    MinQueue queue;
    for (NodeIndex src : sources) {
        if (src >= s.node_count()) throw Error(ErrorCode::IndexOutOfRange, fmt::format("node {} out of range", src));
        dist[src] = 0;
        if (label) (*label)[src] = src;
        queue.emplace(0.0, src);
    }
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        if (u == stop_at) break;
        for (const MeshArc& arc : s.neighbours(u)) {
            const double nd = d + arc.length;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                if (label) (*label)[arc.to] = (*label)[u];
                queue.emplace(nd, arc.to);
            }
        }
    }
    return dist;
}

std::vector<std::vector<Distance>> all_pairs_graph(const Quadrangulation& q, unsigned threads) {
    const VertexGraph graph(q.map());
    std::vector<std::vector<Distance>> out(q.vertex_count());
    parallel_for(out.size(), threads,
                 [&](std::size_t v) { out[v] = bfs_distances(graph, static_cast<VertexId>(v)); });
    return out;
}

}  // namespace

std::vector<double> mesh_distances(const MeshedSurface& s, NodeIndex source) {
    return dijkstra(s, std::span(&source, 1), nullptr);
}

double mesh_distance(const MeshedSurface& s, NodeIndex a, NodeIndex b) {
    if (b >= s.node_count()) throw Error(ErrorCode::IndexOutOfRange, fmt::format("node {} out of range", b));
    return dijkstra(s, std::span(&a, 1), nullptr, b)[b];
}

double verify_vertex_isometry(const Quadrangulation& q, const MeshedSurface& s, unsigned threads) {
    const auto graph = all_pairs_graph(q, threads);
    std::vector<double> worst(q.vertex_count(), 0.0);
    parallel_for(q.vertex_count(), threads, [&](std::size_t u) {
        const auto dist = mesh_distances(s, s.vertex_node(static_cast<VertexId>(u)));
        for (VertexId v = 0; v < q.vertex_count(); ++v) {
            worst[u] = std::max(worst[u], std::abs(dist[s.vertex_node(v)] - graph[u][v]));
        }
    });
    return *std::max_element(worst.begin(), worst.end());
}

DensityReport verify_density_and_gh(const Quadrangulation& q, const MeshedSurface& s, unsigned threads) {
    DensityReport report;
    std::vector<NodeIndex> sources(q.vertex_count());
    for (VertexId v = 0; v < q.vertex_count(); ++v) sources[v] = s.vertex_node(v);
    std::vector<NodeIndex> label;
    report.nearest_distance = dijkstra(s, sources, &label);
    report.nearest.resize(s.node_count());
    for (NodeIndex x = 0; x < s.node_count(); ++x) {
        // Vertex nodes are numbered like the vertices themselves.
        report.nearest[x] = label[x];
        report.density_radius = std::max(report.density_radius, report.nearest_distance[x]);
    }

    const auto graph = all_pairs_graph(q, threads);
    std::vector<double> worst(s.node_count(), 0.0);
    parallel_for(s.node_count(), threads, [&](std::size_t x) {
        const auto dist = mesh_distances(s, static_cast<NodeIndex>(x));
        const auto& row = graph[report.nearest[x]];
        for (NodeIndex y = 0; y < s.node_count(); ++y) {
            worst[x] = std::max(worst[x], std::abs(dist[y] - row[report.nearest[y]]));
        }
    });
    report.gh_upper = *std::max_element(worst.begin(), worst.end()) / 2;
    return report;
}

std::string export_mesh(const MeshedSurface& s) {
    std::string out = "QMESH\n";
    out += fmt::format("{} {} {}\n", s.node_count(), s.edge_count(), s.resolution());
    const double m = s.resolution();
    for (NodeIndex x = 0; x < s.node_count(); ++x) {
        const ChartPoint& p = s.position(x);
        out += fmt::format("{} {:.6g} {:.6g} {:.6g}\n", p.face, p.i / m, p.j / m, p.k / m);
    }
    for (NodeIndex x = 0; x < s.node_count(); ++x) {
        for (const MeshArc& arc : s.neighbours(x)) {
            if (x < arc.to) out += fmt::format("{} {} {:.17g}\n", x, arc.to, arc.length);
        }
    }
    return out;
}

std::string surface_report_csv(std::span<const SurfaceReport> rows) {
    std::string out = "n,m,max_isometry_error,density_radius,gh_upper\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{:.12g},{:.12g},{:.12g}\n", r.n, r.m, r.max_isometry_error, r.density_radius,
                           r.gh_upper);
    }
    return out;
}

}  // namespace qmaps
