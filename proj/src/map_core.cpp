#include "qmaps/map_core.h"

#include <deque>
#include <limits>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "qmaps/error.h"

namespace qmaps {

namespace {

constexpr HalfEdge kUnset = std::numeric_limits<HalfEdge>::max();

void check_permutation(std::span<const HalfEdge> perm, const char* name) {
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t h = 0; h < perm.size(); ++h) {
        if (perm[h] >= perm.size())
            throw Error(ErrorCode::NotPermutation,
                        fmt::format("{}[{}] = {} out of range", name, h, perm[h]));
        if (seen[perm[h]])
            throw Error(ErrorCode::NotPermutation,
                        fmt::format("{} has duplicate entry {}", name, perm[h]));
        seen[perm[h]] = true;
    }
}

}  // namespace

CombinatorialMap CombinatorialMap::build(std::vector<HalfEdge> opposite,
                                         std::vector<HalfEdge> next_at_vertex,
                                         HalfEdge root) {
    const std::size_t count = opposite.size();
    if (next_at_vertex.size() != count)
        throw Error(ErrorCode::NotPermutation,
                    fmt::format("table sizes differ ({} vs {})", count, next_at_vertex.size()));
    if (count == 0 || count % 2 != 0)
        throw Error(ErrorCode::NotInvolution,
                    fmt::format("half-edge count {} must be positive and even", count));
    if (root >= count)
        throw Error(ErrorCode::RootOutOfRange, fmt::format("root {} >= {}", root, count));

    check_permutation(opposite, "opposite");
    check_permutation(next_at_vertex, "next_at_vertex");
    for (std::size_t h = 0; h < count; ++h) {
        if (opposite[h] == h)
            throw Error(ErrorCode::NotInvolution, fmt::format("opposite({0}) = {0}", h));
        if (opposite[opposite[h]] != h)
            throw Error(ErrorCode::NotInvolution, fmt::format("opposite is not an involution at {}", h));
    }

    CombinatorialMap m;
    m.opposite_ = std::move(opposite);
    m.next_at_vertex_ = std::move(next_at_vertex);
    m.root_ = root;
    m.prev_at_vertex_.assign(count, 0);
    for (HalfEdge h = 0; h < count; ++h) m.prev_at_vertex_[m.next_at_vertex_[h]] = h;

    // Connectivity of the group generated by the two permutations.
    {
        std::vector<bool> seen(count, false);
        std::vector<HalfEdge> stack{0};
        seen[0] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
            HalfEdge h = stack.back();
            stack.pop_back();
            for (HalfEdge g : {m.opposite_[h], m.next_at_vertex_[h], m.prev_at_vertex_[h]}) {
                if (!seen[g]) {
                    seen[g] = true;
                    ++reached;
                    stack.push_back(g);
                }
            }
        }
        if (reached != count)
            throw Error(ErrorCode::Disconnected,
                        fmt::format("only {} of {} half-edges reachable", reached, count));
    }

    m.vertex_of_.assign(count, kUnset);
    for (HalfEdge h = 0; h < count; ++h) {
        if (m.vertex_of_[h] != kUnset) continue;
        auto v = static_cast<VertexId>(m.vertex_first_.size());
        m.vertex_first_.push_back(h);
        HalfEdge g = h;
        do {
            m.vertex_of_[g] = v;
            g = m.next_at_vertex_[g];
        } while (g != h);
    }

    m.face_of_.assign(count, kUnset);
    m.face_offsets_.push_back(0);
    m.face_half_edges_.reserve(count);
    for (HalfEdge h = 0; h < count; ++h) {
        if (m.face_of_[h] != kUnset) continue;
        auto f = static_cast<FaceId>(m.face_offsets_.size() - 1);
        HalfEdge g = h;
        do {
            m.face_of_[g] = f;
            m.face_half_edges_.push_back(g);
            g = m.face_next(g);
        } while (g != h);
        m.face_offsets_.push_back(m.face_half_edges_.size());
    }
    return m;
}

std::size_t CombinatorialMap::degree(VertexId v) const {
    std::size_t d = 0;
    HalfEdge h = vertex_first_[v];
    HalfEdge g = h;
    do {
        ++d;
        g = next_at_vertex_[g];
    } while (g != h);
    return d;
}

std::vector<std::vector<HalfEdge>> CombinatorialMap::faces() const {
    std::vector<std::vector<HalfEdge>> out;
    out.reserve(face_count());
    for (FaceId f = 0; f < face_count(); ++f) {
        auto cycle = face(f);
        out.emplace_back(cycle.begin(), cycle.end());
    }
    return out;
}

int CombinatorialMap::euler_characteristic() const {
    return static_cast<int>(vertex_count()) - static_cast<int>(edge_count()) +
           static_cast<int>(face_count());
}

bool CombinatorialMap::is_bipartite() const {
    std::vector<int> color(vertex_count(), -1);
    std::deque<VertexId> queue{0};
    color[0] = 0;
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        HalfEdge h = vertex_first_[v];
        HalfEdge g = h;
        do {
            VertexId w = target(g);
            if (color[w] < 0) {
                color[w] = 1 - color[v];
                queue.push_back(w);
            } else if (color[w] == color[v]) {
                return false;
            }
            g = next_at_vertex_[g];
        } while (g != h);
    }
    return true;
}

Quadrangulation Quadrangulation::from_map(CombinatorialMap map, std::optional<VertexId> pointed) {
    for (FaceId f = 0; f < map.face_count(); ++f) {
        if (map.face(f).size() != 4)
            throw Error(ErrorCode::NotQuadrangulation,
                        fmt::format("face {} has degree {}", f, map.face(f).size()));
    }
    if (map.euler_characteristic() != 2)
        throw Error(ErrorCode::NotQuadrangulation,
                    fmt::format("Euler characteristic {} (expected 2)", map.euler_characteristic()));
    if (!map.is_bipartite())
        throw Error(ErrorCode::NotQuadrangulation, "underlying graph is not bipartite");
    if (pointed && *pointed != map.origin(map.root()))
        throw Error(ErrorCode::NotPointed,
                    fmt::format("pointed vertex {} is not the root origin {}", *pointed,
                                map.origin(map.root())));
    return Quadrangulation(std::move(map));
}

std::vector<std::uint32_t> rooted_canonical_code(const CombinatorialMap& map) {
    const std::size_t count = map.half_edge_count();
    std::vector<HalfEdge> order;
    order.reserve(count);
    std::vector<HalfEdge> label(count, kUnset);
    label[map.root()] = 0;
    order.push_back(map.root());
    for (std::size_t i = 0; i < order.size(); ++i) {
        HalfEdge h = order[i];
        for (HalfEdge g : {map.opposite(h), map.next_at_vertex(h)}) {
            if (label[g] == kUnset) {
                label[g] = static_cast<HalfEdge>(order.size());
                order.push_back(g);
            }
        }
    }
    std::vector<std::uint32_t> code;
    code.reserve(2 * count);
    for (HalfEdge h : order) {
        code.push_back(label[map.opposite(h)]);
        code.push_back(label[map.next_at_vertex(h)]);
    }
    return code;
}

CombinatorialMap relabel_half_edges(const CombinatorialMap& map, std::span<const HalfEdge> relabel) {
    const std::size_t count = map.half_edge_count();
    std::vector<HalfEdge> opp(count), nav(count);
    for (HalfEdge h = 0; h < count; ++h) {
        opp[relabel[h]] = relabel[map.opposite(h)];
        nav[relabel[h]] = relabel[map.next_at_vertex(h)];
    }
    return CombinatorialMap::build(std::move(opp), std::move(nav), relabel[map.root()]);
}

std::string serialize(const CombinatorialMap& map, std::optional<VertexId> pointed_vertex) {
    nlohmann::ordered_json doc;
    doc["half_edges"] = map.half_edge_count();
    doc["opposite"] = std::vector<HalfEdge>(map.opposite_table().begin(), map.opposite_table().end());
    doc["next_at_vertex"] =
        std::vector<HalfEdge>(map.rotation_table().begin(), map.rotation_table().end());
    doc["root"] = map.root();
    if (pointed_vertex) doc["pointed_vertex"] = *pointed_vertex;
    return doc.dump();
}

std::string serialize(const Quadrangulation& quad) {
    return serialize(quad.map(), quad.pointed_vertex());
}

MapDocument deserialize(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("parse error at byte {}: {}", e.byte, e.what()));
    }
    auto field = [&](const char* key) -> const nlohmann::json& {
        if (!doc.is_object() || !doc.contains(key))
            throw Error(ErrorCode::MalformedInput, fmt::format("missing field '{}'", key));
        return doc.at(key);
    };
    auto read_table = [&](const char* key) {
        const auto& arr = field(key);
        if (!arr.is_array())
            throw Error(ErrorCode::MalformedInput, fmt::format("'{}' must be an array", key));
        std::vector<HalfEdge> out;
        out.reserve(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number_unsigned())
                throw Error(ErrorCode::MalformedInput,
                            fmt::format("'{}'[{}] is not a non-negative integer", key, i));
            out.push_back(arr[i].get<HalfEdge>());
        }
        return out;
    };

    const auto& n = field("half_edges");
    if (!n.is_number_unsigned())
        throw Error(ErrorCode::MalformedInput, "'half_edges' must be a non-negative integer");
    auto opposite = read_table("opposite");
    auto rotation = read_table("next_at_vertex");
    if (opposite.size() != n.get<std::size_t>() || rotation.size() != n.get<std::size_t>())
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("tables must have {} entries", n.get<std::size_t>()));
    const auto& root = field("root");
    if (!root.is_number_unsigned())
        throw Error(ErrorCode::MalformedInput, "'root' must be a non-negative integer");

    std::optional<VertexId> pointed;
    if (doc.contains("pointed_vertex") && !doc["pointed_vertex"].is_null()) {
        if (!doc["pointed_vertex"].is_number_unsigned())
            throw Error(ErrorCode::MalformedInput, "'pointed_vertex' must be a non-negative integer");
        pointed = doc["pointed_vertex"].get<VertexId>();
    }
    auto map = CombinatorialMap::build(std::move(opposite), std::move(rotation), root.get<HalfEdge>());
    if (pointed && *pointed >= map.vertex_count())
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("pointed_vertex {} out of range", *pointed));
    return MapDocument{std::move(map), pointed};
}

}  // namespace qmaps
