#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "qmaps/error.h"
#include "qmaps/trees.h"

using namespace qmaps;

namespace {

// Pearson statistic against the uniform law on `support` outcomes.
double chi_square_uniform(const std::map<std::string, long>& counts, std::size_t support, long draws) {
    const double expected = static_cast<double>(draws) / static_cast<double>(support);
    double stat = 0;
    for (const auto& [key, c] : counts) stat += (c - expected) * (c - expected) / expected;
    stat += static_cast<double>(support - counts.size()) * expected;  // unseen outcomes
    return stat;
}

// 99.9% quantiles of the chi-square law, keyed by degrees of freedom.
const std::map<std::size_t, double> kChi2Critical{
    {1, 10.8276}, {4, 18.4668}, {13, 34.5282}, {41, 74.7449}, {53, 90.5734}};

}  // namespace

TEST_CASE("catalan and well-labeled counts") {
    CHECK(catalan(0) == 1);
    CHECK(catalan(3) == 5);
    CHECK(catalan(10) == 16796);
    const std::uint64_t expected[] = {2, 9, 54, 378, 2916};
    for (unsigned n = 1; n <= 5; ++n) CHECK(well_labeled_count(n) == expected[n - 1]);
}

TEST_CASE("enumeration matches the cardinality formula") {
    for (unsigned n = 1; n <= 5; ++n) {
        std::set<std::string> seen;
        std::size_t count = 0;
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            t.validate();
            seen.insert(to_text(t));
            ++count;
        });
        CHECK(count == well_labeled_count(n));
        CHECK(seen.size() == count);
    }
    std::size_t trees = 0;
    enumerate_plane_trees(6, [&](const PlaneTree&) { ++trees; });
    CHECK(trees == catalan(6));
    CHECK_THROWS_AS(enumerate_well_labeled(9, [](const WellLabeledTree&) {}), Error);
}

TEST_CASE("n=1 enumeration gives the two labelings 1-1 and 1-2") {
    auto all = all_well_labeled(1);
    REQUIRE(all.size() == 2);
    CHECK(all[0].labels == std::vector<int>{1, 1});
    CHECK(all[1].labels == std::vector<int>{1, 2});
}

TEST_CASE("sample_plane_tree basics") {
    CHECK_THROWS_AS(sample_plane_tree(0, std::uint64_t{1}), Error);
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(sample_plane_tree(1, s).to_parens() == "()");
    CHECK(sample_plane_tree(500, std::uint64_t{9}) == sample_plane_tree(500, std::uint64_t{9}));
    auto t = sample_plane_tree(1000, std::uint64_t{3});
    CHECK(t.node_count() == 1001);
}

TEST_CASE("sample_plane_tree n=2 frequencies within 3 sigma") {
    const long draws = 100000;
    std::mt19937_64 rng(2024);
    long first = 0;
    for (long i = 0; i < draws; ++i) first += sample_plane_tree(2, rng).to_parens() == "(())";
    const double sigma = std::sqrt(draws * 0.25);
    CHECK(std::abs(first - draws / 2.0) <= 3 * sigma);
}

TEST_CASE("sample_plane_tree chi-square uniformity for n <= 5") {
    const long draws = 100000;
    for (unsigned n = 2; n <= 5; ++n) {
        std::mt19937_64 rng(77 + n);
        std::map<std::string, long> counts;
        for (long i = 0; i < draws; ++i) ++counts[sample_plane_tree(n, rng).to_parens()];
        CHECK(counts.size() == catalan(n));
        const double stat = chi_square_uniform(counts, catalan(n), draws);
        CAPTURE(n);
        CHECK(stat < kChi2Critical.at(catalan(n) - 1));
    }
}

TEST_CASE("exact-rejection sampler: n=1 frequencies within 3 sigma") {
    const long draws = 100000;
    long ones = 0;
    for (long i = 0; i < draws; ++i)
        ones += sample_well_labeled(1, 5000 + i, SamplingMode::ExactRejection).labels[1] == 1;
    CHECK(std::abs(ones - draws / 2.0) <= 3 * std::sqrt(draws * 0.25));
}

TEST_CASE("exact-rejection sampler: uniform over the 54 objects at n=3") {
    const long draws = 1000000;
    std::map<std::string, long> counts;
    for (long i = 0; i < draws; ++i) ++counts[to_text(sample_well_labeled(3, 11 + i, SamplingMode::ExactRejection))];
    CHECK(counts.size() == 54);
    CHECK(chi_square_uniform(counts, 54, draws) < kChi2Critical.at(53));
}

TEST_CASE("free-shift sampler satisfies the well-labeled invariants") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const std::size_t n = 1 + seed * 13 % 700;
        auto t = sample_well_labeled(n, seed, SamplingMode::FreeShift);
        CHECK(t.size() == n);
        CHECK_NOTHROW(t.validate(true));
        CHECK(t.min_label() == 1);
    }
}

TEST_CASE("contour processes: hand-traced examples") {
    WellLabeledTree edge{PlaneTree::from_parens("()"), {1, 2}};
    auto p = contour_processes(edge);
    CHECK(p.C == std::vector<int>{0, 1, 0});
    CHECK(p.L == std::vector<int>{1, 2, 1});

    WellLabeledTree path{PlaneTree::from_parens("(())"), {1, 2, 1}};
    p = contour_processes(path);
    CHECK(p.C == std::vector<int>{0, 1, 2, 1, 0});
    CHECK(p.L == std::vector<int>{1, 2, 1, 2, 1});
}

TEST_CASE("contour processes determine the tree and are injective (n <= 4)") {
    for (unsigned n = 1; n <= 4; ++n) {
        std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            auto p = contour_processes(t);
            CHECK(p.C.front() == 0);
            CHECK(p.C.back() == 0);
            for (std::size_t i = 0; i + 1 < p.C.size(); ++i) {
                CHECK(std::abs(p.C[i + 1] - p.C[i]) == 1);
                CHECK(std::abs(p.L[i + 1] - p.L[i]) <= 1);
            }
            CHECK(from_contour(p) == t);
            seen.insert({p.C, p.L});
        });
        CHECK(seen.size() == well_labeled_count(n));
    }
}

TEST_CASE("from_contour rejects inconsistent processes") {
    ContourPair bad{1, {0, 1, 1}, {1, 1, 1}};
    CHECK_THROWS_AS(from_contour(bad), Error);
    ContourPair relabeled{1, {0, 1, 0}, {1, 2, 3}};
    CHECK_THROWS_AS(from_contour(relabeled), Error);
}

TEST_CASE("reroot keeps the labeled tree and moves the root corner") {
    auto t = sample_well_labeled(60, 5, SamplingMode::ExactRejection);
    CHECK(reroot(t, 0) == t);
    const auto x = contour_nodes(t.tree);
    const auto p = contour_processes(t);
    for (std::size_t k : {1u, 7u, 59u, 119u}) {
        auto r = reroot(t, k);
        auto q = contour_processes(r);
        for (std::size_t i = 0; i < 2 * t.size(); ++i) CHECK(q.L[i] == p.L[(k + i) % (2 * t.size())]);
        auto sorted_a = t.labels, sorted_b = r.labels;
        std::sort(sorted_a.begin(), sorted_a.end());
        std::sort(sorted_b.begin(), sorted_b.end());
        CHECK(sorted_a == sorted_b);
    }
    CHECK_THROWS_AS(reroot(t, 120), Error);
}

TEST_CASE("tree text format") {
    auto t = sample_well_labeled(40, 8, SamplingMode::ExactRejection);
    CHECK(parse_tree_text(to_text(t)) == t);
    CHECK_THROWS_AS(parse_tree_text("(()\n1 2\n"), Error);
    CHECK_THROWS_AS(parse_tree_text("()\n1\n"), Error);
    CHECK_THROWS_AS(parse_tree_text("()\n1 3\n"), Error);
    CHECK_THROWS_AS(parse_tree_text("()\n2 1\n"), Error);
    CHECK_NOTHROW(parse_tree_text("()\n2 1\n", false));
    CHECK_THROWS_AS(parse_tree_text("()\n1 x\n"), Error);
    CHECK(contour_csv(contour_processes(WellLabeledTree{PlaneTree::from_parens("()"), {1, 2}})) ==
          "i,C,L\n0,0,1\n1,1,2\n2,0,1\n");
}
