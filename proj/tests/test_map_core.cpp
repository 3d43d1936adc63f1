#include <random>

#include "doctest.h"
#include "oracles.h"
#include "qmaps/error.h"
#include "qmaps/map_core.h"
#include "qmaps/schaeffer.h"
#include "qmaps/trees.h"

using namespace qmaps;

namespace {

CombinatorialMap single_edge() { return CombinatorialMap::build({1, 0}, {0, 1}, 0); }

// Triangle a-b-c: edges (0,1) a->b, (2,3) b->c, (4,5) c->a.
CombinatorialMap triangle() {
    std::vector<HalfEdge> opp{1, 0, 3, 2, 5, 4};
    std::vector<HalfEdge> nav(6);
    nav[0] = 5; nav[5] = 0;  // a
    nav[1] = 2; nav[2] = 1;  // b
    nav[3] = 4; nav[4] = 3;  // c
    return CombinatorialMap::build(opp, nav, 0);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::MalformedInput;
}

}  // namespace

TEST_CASE("single edge map") {
    auto m = single_edge();
    CHECK(m.vertex_count() == 2);
    CHECK(m.edge_count() == 1);
    CHECK(m.face_count() == 1);
    CHECK(m.face(0).size() == 2);
    CHECK(m.euler_characteristic() == 2);
    CHECK(m.is_bipartite());
}

TEST_CASE("triangle is a planar odd cycle") {
    auto m = triangle();
    CHECK(m.euler_characteristic() == 2);
    CHECK(m.face_count() == 2);
    CHECK_FALSE(m.is_bipartite());
    CHECK_THROWS_AS(Quadrangulation::from_map(m), Error);
}

TEST_CASE("build_map validation errors") {
    CHECK(code_of([] { CombinatorialMap::build({0, 1}, {0, 1}, 0); }) == ErrorCode::NotInvolution);
    CHECK(code_of([] { CombinatorialMap::build({1, 0}, {0, 0}, 0); }) == ErrorCode::NotPermutation);
    CHECK(code_of([] { CombinatorialMap::build({1, 0}, {0, 1}, 2); }) == ErrorCode::RootOutOfRange);
    CHECK(code_of([] { CombinatorialMap::build({1, 0, 3, 2}, {0, 1, 2, 3}, 0); }) ==
          ErrorCode::Disconnected);
    CHECK(code_of([] { CombinatorialMap::build({1, 2, 0, 3}, {0, 1, 2, 3}, 0); }) ==
          ErrorCode::NotInvolution);
}

TEST_CASE("brute force over gluings: rooted quadrangulations with 1 and 2 faces") {
    auto q1 = oracle::brute_force_quadrangulations(1);
    CHECK(q1.size() == 2);
    CHECK(q1.size() == well_labeled_count(1));
    auto q2 = oracle::brute_force_quadrangulations(2);
    CHECK(q2.size() == 9);
}

TEST_CASE("n=1 quadrangulations have one degree-4 face and Euler characteristic 2") {
    for (const auto& t : all_well_labeled(1)) {
        auto q = forward(t);
        CHECK(q.vertex_count() == 3);
        CHECK(q.map().edge_count() == 2);
        REQUIRE(q.map().face_count() == 1);
        CHECK(q.map().face(0).size() == 4);
        CHECK(q.map().euler_characteristic() == 2);
    }
}

TEST_CASE("schaeffer outputs are bipartite spheres with n+2 vertices (exhaustive n <= 4)") {
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            auto q = forward(t);
            CHECK(q.map().face_count() == n);
            for (auto& f : q.map().faces()) CHECK(f.size() == 4);
            CHECK(q.map().euler_characteristic() == 2);
            CHECK(q.map().is_bipartite());
            CHECK(q.vertex_count() == n + 2);
        });
    }
}

TEST_CASE("schaeffer outputs on random samples") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t n = 1 + seed * 37 % 2000;
        auto q = forward(sample_well_labeled(n, seed, SamplingMode::FreeShift));
        CHECK(q.map().euler_characteristic() == 2);
        CHECK(q.map().is_bipartite());
        CHECK(q.vertex_count() == n + 2);
    }
}

TEST_CASE("face count and canonical code are invariant under half-edge relabeling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto q = forward(sample_well_labeled(30, 100 + trial, SamplingMode::ExactRejection));
        std::vector<HalfEdge> perm(q.map().half_edge_count());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto relabeled = relabel_half_edges(q.map(), perm);
        CHECK(relabeled.face_count() == q.map().face_count());
        CHECK(relabeled.vertex_count() == q.map().vertex_count());
        CHECK(rooted_canonical_code(relabeled) == rooted_canonical_code(q.map()));
    }
}

TEST_CASE("serialize/deserialize roundtrip") {
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            auto q = forward(t);
            auto doc = deserialize(serialize(q));
            CHECK(doc.map == q.map());
            REQUIRE(doc.pointed_vertex.has_value());
            CHECK(*doc.pointed_vertex == q.pointed_vertex());
        });
    }
    auto doc = deserialize(serialize(single_edge()));
    CHECK(doc.map == single_edge());
    CHECK_FALSE(doc.pointed_vertex.has_value());
}

TEST_CASE("deserialize errors") {
    const std::string good = serialize(single_edge());
    auto truncated = good.substr(0, good.size() / 2);
    try {
        deserialize(truncated);
        FAIL("truncated input accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedInput);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    CHECK(code_of([] {
              deserialize(R"({"half_edges":4,"opposite":[1,0,3,2],"next_at_vertex":[2,2,1,3],"root":0})");
          }) == ErrorCode::NotPermutation);
    CHECK(code_of([] { deserialize(R"({"half_edges":2,"opposite":[1,0],"root":0})"); }) ==
          ErrorCode::MalformedInput);
    CHECK(code_of([] { deserialize(R"({"half_edges":2,"opposite":[1,0],"next_at_vertex":[0,-1],"root":0})"); }) ==
          ErrorCode::MalformedInput);
}

TEST_CASE("pointed vertex must be the root origin") {
    auto q = forward(all_well_labeled(2).front());
    VertexId wrong = (q.pointed_vertex() + 1) % q.vertex_count();
    CHECK(code_of([&] { Quadrangulation::from_map(q.map(), wrong); }) == ErrorCode::NotPointed);
}
