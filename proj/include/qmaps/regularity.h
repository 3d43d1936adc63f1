#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmaps/map_core.h"
#include "qmaps/metric.h"

namespace qmaps {

/// Closed edge path; half_edges[i] leads from vertices[i] to
/// vertices[(i + 1) % length()].
struct Cycle {
    std::vector<VertexId> vertices;
    std::vector<HalfEdge> half_edges;

    std::size_t length() const { return half_edges.size(); }
};

/// Edge identity used throughout: the smaller of the two half-edge ids.
inline HalfEdge edge_key(const CombinatorialMap& map, HalfEdge h) { return std::min(h, map.opposite(h)); }
/// Sorted edge keys of a cycle.
std::vector<HalfEdge> cycle_edge_keys(const CombinatorialMap& map, const Cycle& c);

inline constexpr unsigned kMaxCycleLength = 14;

struct CycleSearchOptions {
    /// Longest cycle length K (at most kMaxCycleLength).
    unsigned max_len = 8;
    /// Only cycles whose vertices all lie within this distance of the cycle's
    /// smallest vertex.
    std::optional<Distance> max_radius;
    /// Total DFS steps allowed before Error{BudgetExceeded}.
    std::uint64_t step_budget = 4'000'000'000ULL;
    unsigned threads = 0;
};

/// Every simple cycle of length <= K, once each. A cycle is listed from its
/// smallest vertex, in the direction whose first edge key is smaller than its
/// last. Output is ordered by start vertex, then DFS order, independently of
/// the thread count. Throws Error{SizeTooLarge} for K > kMaxCycleLength and
/// Error{BudgetExceeded}.
std::vector<Cycle> enumerate_simple_cycles(const Quadrangulation& q, const CycleSearchOptions& options);

struct CycleSplit {
    std::vector<FaceId> side_a;  // contains the face of the root half-edge
    std::vector<FaceId> side_b;
};

/// The two components of the dual graph once the dual edges crossing the
/// cycle are removed. Throws Error{NotSimple} if `c` is not a simple closed
/// edge path of q and Error{SplitFailed} if the dual does not fall into
/// exactly two components.
CycleSplit split_by_cycle(const Quadrangulation& q, const Cycle& c);

struct CycleReport {
    Cycle cycle;
    Distance cycle_diameter = 0;
    /// Face counts of the two sides; side A holds the root half-edge's face.
    std::size_t faces_a = 0, faces_b = 0;
    /// Faces of the side with fewer faces (the other side is the complement).
    std::vector<FaceId> smaller_side;
    bool smaller_is_a = true;
    /// Ambient graph diameters of the vertex sets of each side. A side
    /// flagged inexact carries a lower bound that already reaches the other
    /// side's exact diameter, so min(diam_a, diam_b) is always exact.
    Distance diam_a = 0, diam_b = 0;
    bool diam_a_exact = true, diam_b_exact = true;
    bool bottleneck = false;
};

struct ScanParams {
    /// Rescaled thresholds; multiplied by n^{1/4} internally.
    double delta = 0.1;
    double epsilon = 0.5;
    unsigned max_len = 12;
    std::uint64_t step_budget = 4'000'000'000ULL;
    unsigned threads = 0;
};

struct ScanSummary {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    unsigned max_len = 0;
    double delta = 0, epsilon = 0;
    std::size_t cycles_scanned = 0;
    std::size_t bottlenecks = 0;
    /// Largest min(diam_a, diam_b) over scanned cycles (0 if none).
    Distance max_min_side_diam = 0;
};

struct ScanResult {
    std::vector<CycleReport> reports;
    ScanSummary summary;
};

/// Scans all simple cycles of length <= K whose ambient diameter is at most
/// delta * n^{1/4}; a cycle is a bottleneck when both sides have diameter at
/// least epsilon * n^{1/4}. summary.seed is left 0 for the caller to fill.
ScanResult bottleneck_scan(const Quadrangulation& q, const ScanParams& params);

std::string scan_summary_csv(std::span<const ScanSummary> rows);
std::string cycle_reports_json(std::span<const CycleReport> reports);

/// Joins two quadrangulations along one edge each: the endpoints are merged
/// (origin with origin) and the two edges become a separating 2-cycle, with
/// a on one side and b on the other. Rooted at a's root.
Quadrangulation glue_along_edges(const Quadrangulation& a, HalfEdge edge_a, const Quadrangulation& b,
                                 HalfEdge edge_b);

/// Two independent uniform quadrangulations with n/2 and n - n/2 faces glued
/// along their root edges.
Quadrangulation dumbbell(std::size_t n, std::uint64_t seed);

}  // namespace qmaps
