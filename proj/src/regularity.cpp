#include "qmaps/regularity.h"

#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "qmaps/error.h"
#include "qmaps/parallel.h"
#include "qmaps/trees.h"
#include "qmaps/schaeffer.h"

namespace qmaps {

std::vector<HalfEdge> cycle_edge_keys(const CombinatorialMap& map, const Cycle& c) {
    std::vector<HalfEdge> keys;
    keys.reserve(c.length());
    for (HalfEdge h : c.half_edges) keys.push_back(edge_key(map, h));
    std::sort(keys.begin(), keys.end());
    return keys;
}

namespace {

class CycleSearch {
public:
    CycleSearch(const CombinatorialMap& map, const CycleSearchOptions& options, std::atomic<std::uint64_t>& steps)
        : map_(map), options_(options), steps_(steps) {}

    // Cycles whose smallest vertex is s.
    std::vector<Cycle> from(VertexId s) {
        start_ = s;
        found_.clear();
        const Distance reach = static_cast<Distance>(options_.max_len / 2);
        radius_ = options_.max_radius ? std::min(*options_.max_radius, reach) : reach;
        ball(s);
        path_vertices_.assign(1, s);
        path_edges_.clear();
        dfs(s, kNoHalfEdge);
        for (VertexId v : touched_) dist_[v] = kUnreached;
        touched_.clear();
        return std::move(found_);
    }

private:
    static constexpr HalfEdge kNoHalfEdge = 0xFFFFFFFFu;

    // Truncated BFS from s over the whole map, radius radius_.
    void ball(VertexId s) {
        if (dist_.size() != map_.vertex_count()) dist_.assign(map_.vertex_count(), kUnreached);
        dist_[s] = 0;
        touched_.push_back(s);
        for (std::size_t head = 0; head < touched_.size(); ++head) {
            const VertexId u = touched_[head];
            if (dist_[u] == radius_) continue;
            const HalfEdge first = map_.vertex_half_edge(u);
            HalfEdge h = first;
            do {
                const VertexId w = map_.target(h);
                if (dist_[w] == kUnreached) {
                    dist_[w] = dist_[u] + 1;
                    touched_.push_back(w);
                }
                h = map_.next_at_vertex(h);
            } while (h != first);
        }
    }

    bool on_path(VertexId v) const {
        return std::find(path_vertices_.begin(), path_vertices_.end(), v) != path_vertices_.end();
    }

    void dfs(VertexId v, HalfEdge incoming) {
        if (steps_.fetch_add(1, std::memory_order_relaxed) >= options_.step_budget) {
            throw Error(ErrorCode::BudgetExceeded,
                        fmt::format("cycle search exceeded {} steps", options_.step_budget));
        }
        const std::size_t len = path_edges_.size();
        const HalfEdge first = map_.vertex_half_edge(v);
        HalfEdge h = first;
        do {
            const HalfEdge here = h;
            h = map_.next_at_vertex(h);
            if (incoming != kNoHalfEdge && edge_key(map_, here) == edge_key(map_, incoming)) continue;
            const VertexId w = map_.target(here);
            if (w == start_) {
                if (len >= 1 && edge_key(map_, path_edges_.front()) < edge_key(map_, here)) {
                    Cycle c;
                    c.vertices = path_vertices_;
                    c.half_edges = path_edges_;
                    c.half_edges.push_back(here);
                    found_.push_back(std::move(c));
                }
                continue;
            }
            if (len + 2 > options_.max_len) continue;  // w plus the closing edge
            if (w < start_ || dist_[w] == kUnreached) continue;
            if (static_cast<std::size_t>(dist_[w]) > options_.max_len - len - 1) continue;
            if (on_path(w)) continue;
            path_vertices_.push_back(w);
            path_edges_.push_back(here);
            dfs(w, here);
            path_vertices_.pop_back();
            path_edges_.pop_back();
        } while (h != first);
    }

    const CombinatorialMap& map_;
    const CycleSearchOptions& options_;
    std::atomic<std::uint64_t>& steps_;
    VertexId start_ = 0;
    Distance radius_ = 0;
    std::vector<Distance> dist_;
    std::vector<VertexId> touched_;
    std::vector<VertexId> path_vertices_;
    std::vector<HalfEdge> path_edges_;
    std::vector<Cycle> found_;
};

}  // namespace

std::vector<Cycle> enumerate_simple_cycles(const Quadrangulation& q, const CycleSearchOptions& options) {
    if (options.max_len > kMaxCycleLength) {
        throw Error(ErrorCode::SizeTooLarge,
                    fmt::format("cycle length limited to {}, got {}", kMaxCycleLength, options.max_len));
    }
    const CombinatorialMap& map = q.map();
    const std::size_t nv = map.vertex_count();
    std::vector<std::vector<Cycle>> per_start(nv);
    std::atomic<std::uint64_t> steps{0};
    if (options.max_len >= 2) {
        // Searchers keep O(V) scratch, so hand out blocks of start vertices.
        const unsigned workers = resolve_threads(options.threads);
        const std::size_t blocks = std::min<std::size_t>(nv, 4 * static_cast<std::size_t>(workers));
        parallel_for(blocks, workers, [&](std::size_t b) {
            CycleSearch search(map, options, steps);
            for (std::size_t s = b * nv / blocks; s < (b + 1) * nv / blocks; ++s) {
                per_start[s] = search.from(static_cast<VertexId>(s));
            }
        });
    }
    std::vector<Cycle> out;
    for (auto& cycles : per_start) {
        for (auto& c : cycles) out.push_back(std::move(c));
    }
    return out;
}

CycleSplit split_by_cycle(const Quadrangulation& q, const Cycle& c) {
    const CombinatorialMap& map = q.map();
    const std::size_t len = c.length();
    if (len < 2 || c.vertices.size() != len) throw Error(ErrorCode::NotSimple, "cycle needs at least two edges");
    std::unordered_set<VertexId> seen_vertices;
    std::unordered_set<HalfEdge> cut;
    for (std::size_t i = 0; i < len; ++i) {
        const HalfEdge h = c.half_edges[i];
        if (h >= map.half_edge_count() || c.vertices[i] >= map.vertex_count()) {
            throw Error(ErrorCode::NotSimple, "cycle refers to elements outside the map");
        }
        if (map.origin(h) != c.vertices[i] || map.target(h) != c.vertices[(i + 1) % len]) {
            throw Error(ErrorCode::NotSimple, fmt::format("half-edge {} does not join cycle vertices {} and {}", h,
                                                          c.vertices[i], c.vertices[(i + 1) % len]));
        }
        if (!seen_vertices.insert(c.vertices[i]).second) {
            throw Error(ErrorCode::NotSimple, fmt::format("vertex {} repeated", c.vertices[i]));
        }
        if (!cut.insert(edge_key(map, h)).second) throw Error(ErrorCode::NotSimple, "edge repeated");
    }

    const std::size_t faces = map.face_count();
    std::vector<int> component(faces, -1);
    int components = 0;
    const FaceId root_face = map.face_of(map.root());
    std::vector<FaceId> order{root_face};
    for (FaceId f = 0; f < faces; ++f) order.push_back(f);
    for (FaceId seed : order) {
        if (component[seed] != -1) continue;
        std::vector<FaceId> stack{seed};
        component[seed] = components;
        while (!stack.empty()) {
            const FaceId f = stack.back();
            stack.pop_back();
            for (HalfEdge h : map.face(f)) {
                if (cut.count(edge_key(map, h))) continue;
                const FaceId g = map.face_of(map.opposite(h));
                if (component[g] == -1) {
                    component[g] = components;
                    stack.push_back(g);
                }
            }
        }
        ++components;
    }
    if (components != 2) {
        throw Error(ErrorCode::SplitFailed, fmt::format("cycle leaves {} dual components", components));
    }
    CycleSplit split;
    for (FaceId f = 0; f < faces; ++f) (component[f] == 0 ? split.side_a : split.side_b).push_back(f);
    return split;
}

namespace {

// Scratch arrays reused across the cycles of one scan. Stamps avoid
// clearing O(n) arrays per cycle.
class ScanWorkspace {
public:
    ScanWorkspace(const CombinatorialMap& map)
        : map_(map), graph_(map), face_stamp_(map.face_count(), 0), vertex_stamp_(map.vertex_count(), 0),
          target_stamp_(map.vertex_count(), 0),
          dist_(map.vertex_count(), kUnreached) {}

    const VertexGraph& graph() const { return graph_; }

    // Whether every pair of cycle vertices is within `limit`; fills the exact
    // diameter when it is.
    bool cycle_within(const Cycle& c, Distance limit, Distance& diameter) {
        diameter = 0;
        for (VertexId v : c.vertices) {
            const Distance d = eccentricity_within(v, c.vertices, limit);
            if (d == kUnreached) return false;
            diameter = std::max(diameter, d);
        }
        return true;
    }

    // Grows the two dual components on either side of the cycle one face at
    // a time each and returns the one that is exhausted first.
    std::vector<FaceId> smaller_side(const Cycle& c, bool& contains_root_face) {
        cut_.clear();
        for (HalfEdge h : c.half_edges) cut_.push_back(edge_key(map_, h));
        std::sort(cut_.begin(), cut_.end());
        const std::uint64_t base = next_stamp(2);
        const std::uint64_t stamp[2] = {base, base + 1};
        std::vector<FaceId> seen[2];
        std::size_t head[2] = {0, 0};
        const HalfEdge h0 = c.half_edges.front();
        const FaceId start[2] = {map_.face_of(h0), map_.face_of(map_.opposite(h0))};
        for (int s = 0; s < 2; ++s) {
            if (face_stamp_[start[s]] == stamp[1 - s]) throw Error(ErrorCode::SplitFailed, "cycle does not separate");
            face_stamp_[start[s]] = stamp[s];
            seen[s].push_back(start[s]);
        }
        for (;;) {
            for (int s = 0; s < 2; ++s) {
                if (head[s] == seen[s].size()) {
                    contains_root_face = face_stamp_[map_.face_of(map_.root())] == stamp[s];
                    return std::move(seen[s]);
                }
                const FaceId f = seen[s][head[s]++];
                for (HalfEdge h : map_.face(f)) {
                    if (std::binary_search(cut_.begin(), cut_.end(), edge_key(map_, h))) continue;
                    const FaceId g = map_.face_of(map_.opposite(h));
                    if (face_stamp_[g] == stamp[s]) continue;
                    if (face_stamp_[g] == stamp[1 - s]) {
                        throw Error(ErrorCode::SplitFailed, "cycle does not separate");
                    }
                    face_stamp_[g] = stamp[s];
                    seen[s].push_back(g);
                }
            }
        }
    }

    // Vertices of the given faces; marks the ones off the cycle so that
    // in_other_side() can test membership of the complementary side.
    std::vector<VertexId> side_vertices(const std::vector<FaceId>& faces, const Cycle& c) {
        interior_stamp_ = next_stamp(1);
        std::vector<VertexId> out;
        for (FaceId f : faces) {
            for (HalfEdge h : map_.face(f)) {
                const VertexId v = map_.origin(h);
                if (vertex_stamp_[v] != interior_stamp_) {
                    vertex_stamp_[v] = interior_stamp_;
                    out.push_back(v);
                }
            }
        }
        for (VertexId v : c.vertices) vertex_stamp_[v] = 0;
        return out;
    }
    bool in_other_side(VertexId v) const { return vertex_stamp_[v] != interior_stamp_; }

    // Exact ambient diameter of a vertex set; each BFS stops once the whole
    // set is settled.
    Distance exact_diameter(const std::vector<VertexId>& set) {
        Distance best = 0;
        for (VertexId v : set) best = std::max(best, eccentricity_within(v, set, kUnreached));
        return best;
    }

    // Double sweep over the complementary side, starting at a cycle vertex.
    Distance other_side_sweep(VertexId start) {
        VertexId far = start;
        farthest_other(bfs_distances(graph_, start), far);
        return farthest_other(bfs_distances(graph_, far), far);
    }

    Distance other_side_exact() {
        std::vector<VertexId> set;
        for (VertexId v = 0; v < map_.vertex_count(); ++v) {
            if (in_other_side(v)) set.push_back(v);
        }
        return exact_diameter(set);
    }

private:
    std::uint64_t next_stamp(std::uint64_t count) {
        const std::uint64_t s = stamp_counter_;
        stamp_counter_ += count;
        return s;
    }

    Distance farthest_other(const std::vector<Distance>& dist, VertexId& arg) const {
        Distance best = 0;
        for (VertexId v = 0; v < dist.size(); ++v) {
            if (in_other_side(v) && dist[v] > best) {
                best = dist[v];
                arg = v;
            }
        }
        return best;
    }

    // Largest distance from `source` to the set, exploring no farther than
    // `limit` (kUnreached: no limit). Returns kUnreached if some member lies
    // beyond the limit.
    Distance eccentricity_within(VertexId source, const std::vector<VertexId>& set, Distance limit) {
        const std::uint64_t member = next_stamp(1);
        std::size_t remaining = 0;
        for (VertexId v : set) {
            if (target_stamp_[v] != member) {
                target_stamp_[v] = member;
                ++remaining;
            }
        }

        touched_.clear();
        dist_[source] = 0;
        touched_.push_back(source);
        Distance best = 0;
        if (target_stamp_[source] == member) --remaining;
        for (std::size_t head = 0; head < touched_.size() && remaining > 0; ++head) {
            const VertexId u = touched_[head];
            if (limit != kUnreached && dist_[u] >= limit) break;
            for (VertexId w : graph_.neighbours(u)) {
                if (dist_[w] != kUnreached) continue;
                dist_[w] = dist_[u] + 1;
                touched_.push_back(w);
                if (target_stamp_[w] == member) {
                    best = dist_[w];
                    --remaining;
                }
            }
        }
        for (VertexId v : touched_) dist_[v] = kUnreached;
        return remaining == 0 ? best : kUnreached;
    }

    const CombinatorialMap& map_;
    VertexGraph graph_;
    std::vector<std::uint64_t> face_stamp_;
    std::vector<std::uint64_t> vertex_stamp_;
    std::vector<std::uint64_t> target_stamp_;
    std::vector<Distance> dist_;
    std::vector<VertexId> touched_;
    std::vector<HalfEdge> cut_;
    std::uint64_t stamp_counter_ = 1;
    std::uint64_t interior_stamp_ = 0;
};

}  // namespace

ScanResult bottleneck_scan(const Quadrangulation& q, const ScanParams& params) {
    const CombinatorialMap& map = q.map();
    const std::size_t n = q.size();
    const double scale = std::pow(static_cast<double>(n), 0.25);
    // Small slack so that thresholds landing on integers (n = 10^4, delta =
    // 0.1) are not lost to rounding in pow.
    constexpr double kSlack = 1e-9;
    const double cycle_limit = params.delta * scale + kSlack;
    const double side_limit = params.epsilon * scale - kSlack;

    ScanResult result;
    result.summary.n = n;
    result.summary.max_len = params.max_len;
    result.summary.delta = params.delta;
    result.summary.epsilon = params.epsilon;
    if (cycle_limit < 1) return result;  // every cycle has diameter >= 1

    CycleSearchOptions options;
    options.max_len = params.max_len;
    options.max_radius = static_cast<Distance>(std::floor(cycle_limit));
    options.step_budget = params.step_budget;
    options.threads = params.threads;
    const auto cycles = enumerate_simple_cycles(q, options);

    ScanWorkspace work(map);
    for (const Cycle& c : cycles) {
        CycleReport report;
        if (!work.cycle_within(c, *options.max_radius, report.cycle_diameter)) continue;
        report.cycle = c;
        bool small_has_root = false;
        report.smaller_side = work.smaller_side(c, small_has_root);
        report.smaller_is_a = small_has_root;
        const std::size_t small_faces = report.smaller_side.size();
        report.faces_a = small_has_root ? small_faces : map.face_count() - small_faces;
        report.faces_b = map.face_count() - report.faces_a;

        const auto small_vertices = work.side_vertices(report.smaller_side, c);
        const Distance d_small = work.exact_diameter(small_vertices);
        Distance d_large = work.other_side_sweep(c.vertices.front());
        bool large_exact = false;
        if (d_large < d_small) {
            d_large = work.other_side_exact();
            large_exact = true;
        }
        report.diam_a = small_has_root ? d_small : d_large;
        report.diam_b = small_has_root ? d_large : d_small;
        (small_has_root ? report.diam_b_exact : report.diam_a_exact) = large_exact;
        const Distance side_min = std::min(d_small, d_large);
        report.bottleneck = side_min >= side_limit;
        result.summary.cycles_scanned += 1;
        result.summary.bottlenecks += report.bottleneck ? 1 : 0;
        result.summary.max_min_side_diam = std::max(result.summary.max_min_side_diam, side_min);
        result.reports.push_back(std::move(report));
    }
    return result;
}

std::string scan_summary_csv(std::span<const ScanSummary> rows) {
    std::string out = "n,seed,K,delta,epsilon,cycles_scanned,bottlenecks,max_min_side_diam\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", r.n, r.seed, r.max_len, r.delta, r.epsilon, r.cycles_scanned,
                           r.bottlenecks, r.max_min_side_diam);
    }
    return out;
}

std::string cycle_reports_json(std::span<const CycleReport> reports) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json item;
        item["vertices"] = r.cycle.vertices;
        item["half_edges"] = r.cycle.half_edges;
        item["cycle_diameter"] = r.cycle_diameter;
        item["faces_a"] = r.faces_a;
        item["faces_b"] = r.faces_b;
        item["diam_a"] = r.diam_a;
        item["diam_b"] = r.diam_b;
        item["diam_a_exact"] = r.diam_a_exact;
        item["diam_b_exact"] = r.diam_b_exact;
        item["bottleneck"] = r.bottleneck;
        out.push_back(std::move(item));
    }
    return out.dump(2) + "\n";
}

Quadrangulation glue_along_edges(const Quadrangulation& a, HalfEdge edge_a, const Quadrangulation& b,
                                 HalfEdge edge_b) {
    const CombinatorialMap& ma = a.map();
    const CombinatorialMap& mb = b.map();
    if (edge_a >= ma.half_edge_count() || edge_b >= mb.half_edge_count()) {
        throw Error(ErrorCode::IndexOutOfRange, "gluing edge out of range");
    }
    const auto offset = static_cast<HalfEdge>(ma.half_edge_count());
    std::vector<HalfEdge> opp, nav;
    for (HalfEdge h = 0; h < offset; ++h) {
        opp.push_back(ma.opposite(h));
        nav.push_back(ma.next_at_vertex(h));
    }
    for (HalfEdge h = 0; h < mb.half_edge_count(); ++h) {
        opp.push_back(mb.opposite(h) + offset);
        nav.push_back(mb.next_at_vertex(h) + offset);
    }
    const HalfEdge h1 = edge_a, o1 = ma.opposite(edge_a);
    const HalfEdge h2 = edge_b + offset, o2 = mb.opposite(edge_b) + offset;
    // Merge the rotations at both endpoints and cross the edge pairings:
    // faces are unchanged, two pairs of vertices become one each.
    std::swap(nav[h1], nav[h2]);
    std::swap(nav[o1], nav[o2]);
    opp[h1] = o2;
    opp[o2] = h1;
    opp[h2] = o1;
    opp[o1] = h2;
    return Quadrangulation::from_map(CombinatorialMap::build(std::move(opp), std::move(nav), ma.root()));
}

Quadrangulation dumbbell(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorCode::EmptyTree, "a dumbbell needs at least two faces");
    const auto left = forward(sample_well_labeled(n / 2, seed, SamplingMode::ExactRejection));
    const auto right = forward(sample_well_labeled(n - n / 2, seed ^ 0x9E3779B97F4A7C15ULL, SamplingMode::ExactRejection));
    return glue_along_edges(left, left.map().root(), right, right.map().root());
}

}  // namespace qmaps
