#include <set>

#include "doctest.h"
#include "oracles.h"
#include "qmaps/error.h"
#include "qmaps/schaeffer.h"

using namespace qmaps;

TEST_CASE("n=1: the two trees give the two brute-force rooted quadrangulations") {
    const auto brute = oracle::brute_force_quadrangulations(1);
    WellLabeledTree flat{PlaneTree::from_parens("()"), {1, 1}};
    WellLabeledTree rising{PlaneTree::from_parens("()"), {1, 2}};
    auto a = rooted_canonical_code(forward(flat).map());
    auto b = rooted_canonical_code(forward(rising).map());
    CHECK(a != b);
    CHECK(brute.count(a) == 1);
    CHECK(brute.count(b) == 1);
    CHECK(distance_labels(forward(flat)) != distance_labels(forward(rising)));
}

TEST_CASE("forward image equals the brute-force set for n <= 2") {
    for (unsigned n = 1; n <= 2; ++n) {
        std::set<std::vector<std::uint32_t>> image;
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) { image.insert(rooted_canonical_code(forward(t).map())); });
        CHECK(image == oracle::brute_force_quadrangulations(n));
    }
}

TEST_CASE("forward is injective on rooted maps with |Q_n| images (n <= 4)") {
    for (unsigned n = 1; n <= 4; ++n) {
        std::set<std::vector<std::uint32_t>> image;
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) { image.insert(rooted_canonical_code(forward(t).map())); });
        CHECK(image.size() == well_labeled_count(n));
    }
}

TEST_CASE("root edge leaves the pointed vertex towards the tree root") {
    auto t = sample_well_labeled(50, 3, SamplingMode::ExactRejection);
    auto q = forward(t);
    CHECK(q.map().root() == 1);
    CHECK(corner_vertex(q, 0) == q.map().target(q.map().root()));
    CHECK(distance_labels(q)[q.pointed_vertex()] == 0);
}

TEST_CASE("labels equal distances from the pointed vertex (Floyd-Warshall oracle)") {
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            auto q = forward(t);
            auto d = oracle::floyd_warshall(q.map());
            for (std::size_t i = 0; i <= 2 * n; ++i) {
                const auto p = contour_processes(t);
                CHECK(d[q.pointed_vertex()][corner_vertex(q, i)] == p.L[i]);
            }
        });
    }
}

TEST_CASE("corner successors point to the next smaller label") {
    auto t = sample_well_labeled(300, 12, SamplingMode::FreeShift);
    auto corners = corner_sequence(t);
    const std::size_t len = corners.size();
    for (std::size_t k = 0; k < len; ++k) {
        if (corners[k].label == 1) {
            CHECK(corners[k].successor == kToPointed);
            continue;
        }
        std::size_t j = (k + 1) % len;
        while (corners[j].label != corners[k].label - 1) j = (j + 1) % len;
        CHECK(corners[k].successor == j);
    }
}

TEST_CASE("reverse(forward(t)) == t exhaustively for n <= 4") {
    std::size_t checked = 0;
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            CHECK(reverse(forward(t)) == t);
            ++checked;
        });
    }
    CHECK(checked == 2 + 9 + 54 + 378);
}

TEST_CASE("reverse(forward(t)) == t on random samples") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto t = sample_well_labeled(200, seed, SamplingMode::ExactRejection);
        CHECK(reverse(forward(t)) == t);
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto t = sample_well_labeled(20000, seed, SamplingMode::FreeShift);
        CHECK(reverse(forward(t)) == t);
    }
}

TEST_CASE("reverse labels are BFS distances recomputed independently") {
    auto t = sample_well_labeled(25, 99, SamplingMode::ExactRejection);
    auto q = forward(t);
    auto back = reverse(q);
    auto d = oracle::floyd_warshall(q.map());
    const auto nodes = contour_nodes(back.tree);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        CHECK(back.labels[nodes[i]] == d[q.pointed_vertex()][corner_vertex(q, i)]);
}

TEST_CASE("tree and quadrangulation edges form a planar overlay (n <= 4)") {
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            auto overlay = forward_overlay(t);
            CHECK(overlay.edge_count() == 3 * n);
            CHECK(overlay.vertex_count() == n + 2);
            CHECK(overlay.euler_characteristic() == 2);
            // each quadrangle is cut by its tree edge into 3+3 or 2+4
            CHECK(overlay.face_count() == 2 * n);
            for (auto& f : overlay.faces()) CHECK((f.size() >= 2 && f.size() <= 4));
        });
    }
}

TEST_CASE("forward accepts positive labelings whose root label is not 1") {
    WellLabeledTree t{PlaneTree::from_parens("(())"), {2, 1, 2}};
    auto q = forward(t);
    CHECK(q.vertex_count() == 4);
    CHECK(distance_labels(q)[q.map().target(q.map().root())] == 1);
    WellLabeledTree zero{PlaneTree::from_parens("()"), {0, 1}};
    CHECK_THROWS_AS(forward(zero), Error);
}

TEST_CASE("corner_vertex range check") {
    auto q = forward(all_well_labeled(2).front());
    CHECK_NOTHROW(corner_vertex(q, 4));
    CHECK_THROWS_AS(corner_vertex(q, 5), Error);
}

TEST_CASE("non-quadrangulations are rejected before reverse") {
    // Single edge: one face of degree 2.
    auto doc = deserialize(R"({"half_edges":2,"opposite":[1,0],"next_at_vertex":[0,1],"root":0})");
    try {
        Quadrangulation::from_map(doc.map);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotQuadrangulation);
    }
}
