#include "qmaps/metric.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "qmaps/error.h"
#include "qmaps/parallel.h"
#include "qmaps/schaeffer.h"

namespace qmaps {

VertexGraph::VertexGraph(const CombinatorialMap& map) {
    const std::size_t nv = map.vertex_count();
    offsets_.assign(nv + 1, 0);
    for (VertexId v = 0; v < nv; ++v) offsets_[v + 1] = offsets_[v] + map.degree(v);
    targets_.resize(offsets_[nv]);
    for (VertexId v = 0; v < nv; ++v) {
        const HalfEdge start = map.vertex_half_edge(v);
        HalfEdge h = start;
        std::size_t pos = offsets_[v];
        do {
            targets_[pos++] = map.target(h);
            h = map.next_at_vertex(h);
        } while (h != start);
    }
}

std::vector<Distance> bfs_distances(const VertexGraph& graph, VertexId source) {
    const std::size_t nv = graph.vertex_count();
    if (source >= nv) throw Error(ErrorCode::IndexOutOfRange, fmt::format("vertex {} out of range", source));
    std::vector<Distance> dist(nv, kUnreached);
    std::vector<VertexId> queue;
    queue.reserve(nv);
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId u = queue[head];
        for (VertexId w : graph.neighbours(u)) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::vector<Distance> bfs_distances(const Quadrangulation& q, VertexId source) {
    return bfs_distances(VertexGraph(q.map()), source);
}

Distance bfs_distance(const VertexGraph& graph, VertexId source, VertexId target) {
    const std::size_t nv = graph.vertex_count();
    if (source >= nv || target >= nv) throw Error(ErrorCode::IndexOutOfRange, "vertex out of range");
    if (source == target) return 0;
    std::vector<Distance> dist(nv, kUnreached);
    std::vector<VertexId> queue;
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const VertexId u = queue[head];
        for (VertexId w : graph.neighbours(u)) {
            if (dist[w] != kUnreached) continue;
            dist[w] = dist[u] + 1;
            if (w == target) return dist[w];
            queue.push_back(w);
        }
    }
    return kUnreached;
}

RadiusProfile radius_and_profile(const Quadrangulation& q) {
    const auto dist = bfs_distances(q, q.pointed_vertex());
    RadiusProfile rp;
    rp.radius = *std::max_element(dist.begin(), dist.end());
    rp.profile.assign(static_cast<std::size_t>(rp.radius) + 1, 0);
    for (Distance d : dist) ++rp.profile[static_cast<std::size_t>(d)];
    return rp;
}

namespace {

struct Farthest {
    Distance dist;
    VertexId vertex;
};

Farthest farthest(const std::vector<Distance>& dist) {
    Farthest best{0, 0};
    for (VertexId v = 0; v < dist.size(); ++v) {
        if (dist[v] > best.dist) best = {dist[v], v};
    }
    return best;
}

}  // namespace

DiameterResult diameter(const VertexGraph& graph, VertexId start, DiameterMode mode, unsigned threads) {
    const std::size_t nv = graph.vertex_count();
    DiameterResult result;
    if (mode == DiameterMode::DoubleSweep) {
        const Farthest first = farthest(bfs_distances(graph, start));
        const Farthest second = farthest(bfs_distances(graph, first.vertex));
        result.value = second.dist;
        result.a = first.vertex;
        result.b = second.vertex;
        result.exact = nv <= 2;
        return result;
    }
    if (nv > kExactDiameterLimit) {
        throw Error(ErrorCode::SizeTooLarge,
                    fmt::format("exact diameter limited to {} vertices, got {}", kExactDiameterLimit, nv));
    }
    std::vector<Farthest> per_source(nv);
    parallel_for(nv, threads, [&](std::size_t s) {
        per_source[s] = farthest(bfs_distances(graph, static_cast<VertexId>(s)));
    });
    result.exact = true;
    for (VertexId s = 0; s < nv; ++s) {
        if (per_source[s].dist > result.value) {
            result.value = per_source[s].dist;
            result.a = s;
            result.b = per_source[s].vertex;
        }
    }
    return result;
}

DiameterResult diameter(const Quadrangulation& q, DiameterMode mode, unsigned threads) {
    return diameter(VertexGraph(q.map()), q.pointed_vertex(), mode, threads);
}

namespace {

void check_indices(const ContourPair& pair, std::size_t i, std::size_t j) {
    if (!(i < j && j <= 2 * pair.n)) {
        throw Error(ErrorCode::IndexOutOfRange,
                    fmt::format("contour indices must satisfy 0 <= i < j <= {}, got ({}, {})", 2 * pair.n, i, j));
    }
}

}  // namespace

int contour_bound_rhs(const ContourPair& pair, std::size_t i, std::size_t j) {
    check_indices(pair, i, j);
    const int low = *std::min_element(pair.L.begin() + static_cast<std::ptrdiff_t>(i),
                                      pair.L.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    return pair.L[i] + pair.L[j] - 2 * low + 2;
}

BoundCheck check_contour_bound(const ContourPair& pair, const Quadrangulation& q, std::size_t i,
                               std::size_t j) {
    const std::pair<std::size_t, std::size_t> one{i, j};
    return check_contour_bounds(pair, q, std::span(&one, 1), 1).front();
}

std::vector<BoundCheck> check_contour_bounds(const ContourPair& pair, const Quadrangulation& q,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                             unsigned threads) {
    std::vector<BoundCheck> out(pairs.size());
    std::vector<VertexId> source(pairs.size()), target(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        out[k].i = i;
        out[k].j = j;
        out[k].rhs = contour_bound_rhs(pair, i, j);
        source[k] = corner_vertex(q, i);
        target[k] = corner_vertex(q, j);
    }

    std::vector<std::size_t> order(pairs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return source[a] < source[b]; });
    std::vector<std::size_t> group_start;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || source[order[k]] != source[order[k - 1]]) group_start.push_back(k);
    }
    group_start.push_back(order.size());

    const VertexGraph graph(q.map());
    parallel_for(group_start.size() - 1, threads, [&](std::size_t g) {
        const auto dist = bfs_distances(graph, source[order[group_start[g]]]);
        for (std::size_t k = group_start[g]; k < group_start[g + 1]; ++k) {
            BoundCheck& c = out[order[k]];
            c.lhs = dist[target[order[k]]];
            c.holds = c.lhs <= c.rhs;
        }
    });
    return out;
}

std::string profile_csv(const RadiusProfile& rp) {
    std::string out = "distance,count\n";
    for (std::size_t d = 0; d < rp.profile.size(); ++d) out += fmt::format("{},{}\n", d, rp.profile[d]);
    return out;
}

std::string bound_report_csv(std::span<const BoundCheck> checks) {
    std::string out = "i,j,lhs,rhs\n";
    for (const auto& c : checks) out += fmt::format("{},{},{},{}\n", c.i, c.j, c.lhs, c.rhs);
    return out;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<double> matrix, std::size_t n) {
    if (matrix.size() != n * n) {
        throw Error(ErrorCode::MalformedInput, fmt::format("expected {} entries, got {}", n * n, matrix.size()));
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double d = matrix[a * n + b];
            if (!std::isfinite(d) || d < 0) {
                throw Error(ErrorCode::MalformedInput, fmt::format("bad distance at ({}, {})", a, b));
            }
            if ((a == b) != (d == 0)) {
                throw Error(ErrorCode::MalformedInput,
                            fmt::format("distance at ({}, {}) must be {}", a, b, a == b ? "zero" : "positive"));
            }
            if (d != matrix[b * n + a]) {
                throw Error(ErrorCode::MalformedInput, fmt::format("asymmetric at ({}, {})", a, b));
            }
        }
    }
    FiniteMetricSpace space;
    space.size_ = n;
    space.matrix_ = std::make_shared<const std::vector<double>>(std::move(matrix));
    return space;
}

FiniteMetricSpace FiniteMetricSpace::from_graph(const CombinatorialMap& map) {
    FiniteMetricSpace space;
    space.size_ = map.vertex_count();
    space.graph_ = std::make_shared<GraphBacking>(map);
    return space;
}

double FiniteMetricSpace::distance(std::size_t a, std::size_t b) const {
    if (a >= size_ || b >= size_) throw Error(ErrorCode::IndexOutOfRange, "point out of range");
    if (matrix_) return scale_ * (*matrix_)[a * size_ + b];
    std::lock_guard lock(graph_->mutex);
    auto it = graph_->rows.find(a);
    if (it == graph_->rows.end()) {
        it = graph_->rows.find(b);
        if (it != graph_->rows.end()) return scale_ * it->second[a];
        it = graph_->rows.emplace(a, bfs_distances(graph_->graph, static_cast<VertexId>(a))).first;
    }
    return scale_ * it->second[b];
}

std::vector<double> FiniteMetricSpace::row(std::size_t a) const {
    std::vector<double> out(size_);
    if (matrix_) {
        for (std::size_t b = 0; b < size_; ++b) out[b] = scale_ * (*matrix_)[a * size_ + b];
        return out;
    }
    distance(a, a);  // fills the cache row
    std::lock_guard lock(graph_->mutex);
    const auto& dist = graph_->rows.at(a);
    for (std::size_t b = 0; b < size_; ++b) out[b] = scale_ * dist[b];
    return out;
}

FiniteMetricSpace FiniteMetricSpace::scaled(double factor) const {
    if (!(factor > 0) || !std::isfinite(factor)) {
        throw Error(ErrorCode::MalformedInput, "scale factor must be positive");
    }
    FiniteMetricSpace copy = *this;
    copy.scale_ *= factor;
    return copy;
}

double FiniteMetricSpace::diameter() const {
    double best = 0;
    for (std::size_t a = 0; a < size_; ++a) {
        const auto r = row(a);
        best = std::max(best, *std::max_element(r.begin(), r.end()));
    }
    return best;
}

std::vector<double> FiniteMetricSpace::to_matrix() const {
    std::vector<double> out;
    out.reserve(size_ * size_);
    for (std::size_t a = 0; a < size_; ++a) {
        const auto r = row(a);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

}  // namespace qmaps
