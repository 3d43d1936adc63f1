#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qmaps/map_core.h"
#include "qmaps/trees.h"

namespace qmaps {

using Distance = std::int32_t;
inline constexpr Distance kUnreached = -1;

/// Vertex adjacency of a map in compressed rows (parallel edges repeated).
class VertexGraph {
public:
    explicit VertexGraph(const CombinatorialMap& map);

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    std::span<const VertexId> neighbours(VertexId v) const {
        return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<VertexId> targets_;
};

std::vector<Distance> bfs_distances(const VertexGraph& graph, VertexId source);
std::vector<Distance> bfs_distances(const Quadrangulation& q, VertexId source);
/// Stops as soon as `target` is settled.
Distance bfs_distance(const VertexGraph& graph, VertexId source, VertexId target);

struct RadiusProfile {
    Distance radius = 0;
    /// profile[d] = number of vertices at distance d from the pointed vertex.
    std::vector<std::size_t> profile;
};

RadiusProfile radius_and_profile(const Quadrangulation& q);

enum class DiameterMode { Exact, DoubleSweep };

struct DiameterResult {
    Distance value = 0;
    /// A pair realizing `value`.
    VertexId a = 0, b = 0;
    bool exact = false;
};

inline constexpr std::size_t kExactDiameterLimit = 20000;

/// Exact mode runs BFS from every vertex and throws Error{SizeTooLarge} above
/// kExactDiameterLimit vertices. Double sweep returns a lower bound realized
/// by an actual pair: BFS from the pointed vertex, then from the farthest
/// vertex found.
DiameterResult diameter(const Quadrangulation& q, DiameterMode mode, unsigned threads = 0);
DiameterResult diameter(const VertexGraph& graph, VertexId start, DiameterMode mode,
                        unsigned threads = 0);

/// Upper bound on the distance between the vertices visited at contour times
/// i < j: L_i + L_j - 2 min_{i<=k<=j} L_k + 2.
int contour_bound_rhs(const ContourPair& pair, std::size_t i, std::size_t j);

struct BoundCheck {
    std::size_t i = 0, j = 0;
    Distance lhs = 0;
    int rhs = 0;
    bool holds = false;
};

/// q must be forward() of the tree encoded by `pair`.
/// Throws Error{IndexOutOfRange} unless 0 <= i < j <= 2n.
BoundCheck check_contour_bound(const ContourPair& pair, const Quadrangulation& q, std::size_t i,
                               std::size_t j);
/// Batched version; one BFS per distinct source vertex, spread over threads.
std::vector<BoundCheck> check_contour_bounds(const ContourPair& pair, const Quadrangulation& q,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                             unsigned threads = 0);

std::string profile_csv(const RadiusProfile& rp);
std::string bound_report_csv(std::span<const BoundCheck> checks);

/// Finite metric space, either a dense matrix or the graph metric of a map
/// evaluated by BFS on demand. Distances are multiplied by scale().
class FiniteMetricSpace {
public:
    /// Row-major n*n matrix. Throws Error{MalformedInput} if it is not
    /// symmetric, non-negative and zero exactly on the diagonal.
    static FiniteMetricSpace from_matrix(std::vector<double> matrix, std::size_t n);
    static FiniteMetricSpace from_graph(const CombinatorialMap& map);

    std::size_t size() const { return size_; }
    double distance(std::size_t a, std::size_t b) const;
    double scale() const { return scale_; }
    bool matrix_backed() const { return graph_ == nullptr; }

    /// Same points, distances multiplied by `factor`.
    FiniteMetricSpace scaled(double factor) const;
    double diameter() const;
    /// Distance row from `a` (scaled).
    std::vector<double> row(std::size_t a) const;
    /// Dense matrix (scaled). Intended for small spaces.
    std::vector<double> to_matrix() const;

private:
    struct GraphBacking {
        explicit GraphBacking(const CombinatorialMap& map) : graph(map) {}
        VertexGraph graph;
        std::mutex mutex;
        std::unordered_map<std::size_t, std::vector<Distance>> rows;
    };

    std::size_t size_ = 0;
    double scale_ = 1.0;
    std::shared_ptr<const std::vector<double>> matrix_;
    std::shared_ptr<GraphBacking> graph_;
};

}  // namespace qmaps
