#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmaps {

using HalfEdge = std::uint32_t;
using VertexId = std::uint32_t;
using FaceId = std::uint32_t;

/// Graph embedded on an orientable surface, encoded as a rotation system on
/// half-edges.
///
/// Conventions (fixed for the whole library):
///  - `opposite` is the edge involution; `next_at_vertex` turns
///    counterclockwise around the origin of a half-edge.
///  - a face is an orbit of `face_next = next_at_vertex ∘ opposite`, i.e. the
///    half-edge following `h` along its face is `next_at_vertex(opposite(h))`.
///    Faces lie to the right of the traversal.
///  - vertex and face ids are derived: the k-th orbit discovered when scanning
///    half-edges 0, 1, 2, ... gets id k.
///
/// Instances are immutable once built and can be shared across threads.
class CombinatorialMap {
public:
    /// Validates the tables and precomputes vertex/face orbits.
    /// Throws Error{NotInvolution | NotPermutation | Disconnected | RootOutOfRange}.
    static CombinatorialMap build(std::vector<HalfEdge> opposite,
                                  std::vector<HalfEdge> next_at_vertex,
                                  HalfEdge root);

    std::size_t half_edge_count() const { return opposite_.size(); }
    std::size_t edge_count() const { return opposite_.size() / 2; }
    std::size_t vertex_count() const { return vertex_first_.size(); }
    std::size_t face_count() const { return face_offsets_.size() - 1; }

    HalfEdge root() const { return root_; }
    HalfEdge opposite(HalfEdge h) const { return opposite_[h]; }
    HalfEdge next_at_vertex(HalfEdge h) const { return next_at_vertex_[h]; }
    HalfEdge prev_at_vertex(HalfEdge h) const { return prev_at_vertex_[h]; }
    HalfEdge face_next(HalfEdge h) const { return next_at_vertex_[opposite_[h]]; }

    VertexId origin(HalfEdge h) const { return vertex_of_[h]; }
    VertexId target(HalfEdge h) const { return vertex_of_[opposite_[h]]; }
    FaceId face_of(HalfEdge h) const { return face_of_[h]; }

    /// Some half-edge leaving `v`; iterate with next_at_vertex to walk the
    /// counterclockwise rotation.
    HalfEdge vertex_half_edge(VertexId v) const { return vertex_first_[v]; }
    std::size_t degree(VertexId v) const;

    /// Half-edges of face `f` in traversal order, starting at its smallest id.
    std::span<const HalfEdge> face(FaceId f) const {
        return {face_half_edges_.data() + face_offsets_[f],
                face_offsets_[f + 1] - face_offsets_[f]};
    }
    std::vector<std::vector<HalfEdge>> faces() const;

    std::span<const HalfEdge> opposite_table() const { return opposite_; }
    std::span<const HalfEdge> rotation_table() const { return next_at_vertex_; }

    int euler_characteristic() const;
    int genus() const { return (2 - euler_characteristic()) / 2; }
    bool is_bipartite() const;

    bool operator==(const CombinatorialMap& other) const {
        return root_ == other.root_ && opposite_ == other.opposite_ &&
               next_at_vertex_ == other.next_at_vertex_;
    }

private:
    CombinatorialMap() = default;

    std::vector<HalfEdge> opposite_;
    std::vector<HalfEdge> next_at_vertex_;
    std::vector<HalfEdge> prev_at_vertex_;
    HalfEdge root_ = 0;

    std::vector<VertexId> vertex_of_;
    std::vector<HalfEdge> vertex_first_;
    std::vector<FaceId> face_of_;
    std::vector<std::size_t> face_offsets_;
    std::vector<HalfEdge> face_half_edges_;
};

/// Rooted quadrangulation of the sphere, pointed at the origin of its root.
class Quadrangulation {
public:
    /// Throws Error{NotQuadrangulation} unless every face has degree 4, the
    /// surface is a sphere and the graph is bipartite; Error{NotPointed} if a
    /// pointed vertex is given and differs from the root's origin.
    static Quadrangulation from_map(CombinatorialMap map,
                                    std::optional<VertexId> pointed = std::nullopt);

    const CombinatorialMap& map() const { return map_; }
    VertexId pointed_vertex() const { return map_.origin(map_.root()); }
    /// Number of faces.
    std::size_t size() const { return map_.face_count(); }
    std::size_t vertex_count() const { return map_.vertex_count(); }

    bool operator==(const Quadrangulation& other) const { return map_ == other.map_; }

private:
    explicit Quadrangulation(CombinatorialMap map) : map_(std::move(map)) {}
    CombinatorialMap map_;
};

/// Code of the map after relabeling half-edges in BFS order from the root.
/// Two rooted maps are isomorphic (root-preserving, orientation-preserving)
/// iff their codes are equal.
std::vector<std::uint32_t> rooted_canonical_code(const CombinatorialMap& map);

/// Conjugates both permutations by `relabel` (new id of half-edge h is
/// relabel[h]). Used to check relabeling invariance.
CombinatorialMap relabel_half_edges(const CombinatorialMap& map,
                                    std::span<const HalfEdge> relabel);

struct MapDocument {
    CombinatorialMap map;
    std::optional<VertexId> pointed_vertex;
};

inline constexpr int kMapSchemaVersion = 1;

std::string serialize(const CombinatorialMap& map,
                      std::optional<VertexId> pointed_vertex = std::nullopt);
std::string serialize(const Quadrangulation& quad);

/// Throws Error{MalformedInput} (message carries the byte position) or any
/// of the build() validation errors.
MapDocument deserialize(std::string_view json);

}  // namespace qmaps
