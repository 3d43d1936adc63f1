// Runs the ten acceptance criteria at their stated sizes and tolerances and
// prints one PASS/FAIL line per criterion. Exit status is 0 only if all pass.
//
//   acceptance [--only 1,2,...] [--out-dir DIR] [--threads T]

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "qmaps/experiments.h"
#include "qmaps/gh.h"
#include "qmaps/metric.h"
#include "qmaps/regularity.h"
#include "qmaps/schaeffer.h"
#include "qmaps/surface.h"
#include "qmaps/trees.h"

namespace {

using namespace qmaps;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kMasterSeed = 2024;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Options {
    std::set<int> only;
    std::filesystem::path out_dir = "acceptance_out";
    unsigned threads = 0;
};

std::vector<int> bfs(const std::vector<std::vector<VertexId>>& adj, VertexId s) {
    std::vector<int> d(adj.size(), -1);
    std::deque<VertexId> queue{s};
    d[s] = 0;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto w : adj[v])
            if (d[w] < 0) {
                d[w] = d[v] + 1;
                queue.push_back(w);
            }
    }
    return d;
}

/// l(x) = d(x, x*) for every vertex, with distances from an independent BFS.
bool labels_match_distances(const WellLabeledTree& t, const Quadrangulation& q) {
    const auto d = bfs(oracle::adjacency(q.map()), q.pointed_vertex());
    const auto pair = contour_processes(t);
    std::vector<bool> seen(q.vertex_count(), false);
    for (std::size_t i = 0; i <= 2 * t.size(); ++i) {
        const auto v = corner_vertex(q, i);
        if (d[v] != pair.L[i]) return false;
        seen[v] = true;
    }
    seen[q.pointed_vertex()] = true;
    return d[q.pointed_vertex()] == 0 && std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

// ------------------------------------------------------------------------

Outcome counting(const Options&) {
    const std::uint64_t expected[] = {2, 9, 54, 378};
    std::string detail;
    bool ok = true;
    for (unsigned n = 1; n <= 4; ++n) {
        std::set<std::vector<std::uint32_t>> codes;
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) { codes.insert(rooted_canonical_code(forward(t).map())); });
        ok = ok && codes.size() == expected[n - 1] && well_labeled_count(n) == expected[n - 1];
        detail += fmt::format("{}{}", n == 1 ? "" : "/", codes.size());
    }
    return {ok, detail + " distinct maps for n=1..4"};
}

Outcome bijection(const Options&, bool labels) {
    std::size_t objects = 0, failures = 0;
    auto check = [&](const WellLabeledTree& t) {
        ++objects;
        const auto q = forward(t);
        const bool ok = labels ? labels_match_distances(t, q) : reverse(q) == t;
        if (!ok) ++failures;
    };
    for (unsigned n = 1; n <= 4; ++n) enumerate_well_labeled(n, check);
    const std::size_t enumerated = objects;
    for (std::size_t s = 0; s < 10'000; ++s)
        check(sample_well_labeled(200, derive_seed(kMasterSeed, 200, s), SamplingMode::ExactRejection));
    return {failures == 0 && enumerated == 443,
            fmt::format("{} failures over {} enumerated + {} sampled (n=200)", failures, enumerated,
                        objects - enumerated)};
}

Outcome contour_bound(const Options& opt) {
    std::size_t pairs = 0, violations = 0;
    for (unsigned n = 1; n <= 4; ++n) {
        enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
            const auto q = forward(t);
            const auto pair = contour_processes(t);
            const auto adj = oracle::adjacency(q.map());
            for (std::size_t i = 0; i < 2 * n; ++i) {
                const auto d = bfs(adj, corner_vertex(q, i));
                for (std::size_t j = i + 1; j <= 2 * n; ++j) {
                    const int lo = *std::min_element(pair.L.begin() + i, pair.L.begin() + j + 1);
                    const int rhs = pair.L[i] + pair.L[j] - 2 * lo + 2;
                    ++pairs;
                    if (d[corner_vertex(q, j)] > rhs) ++violations;
                }
            }
        });
    }
    const std::size_t exhaustive = pairs;
    const std::size_t n = 10'000;
    for (std::size_t s = 0; s < 10; ++s) {
        const auto seed = derive_seed(kMasterSeed, n, s);
        const auto t = sample_well_labeled(n, seed, SamplingMode::ExactRejection);
        const auto q = forward(t);
        const auto pair = contour_processes(t);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, 2 * n);
        std::vector<std::pair<std::size_t, std::size_t>> idx;
        while (idx.size() < 10'000) {
            auto i = pick(rng), j = pick(rng);
            if (i != j) idx.emplace_back(std::min(i, j), std::max(i, j));
        }
        for (const auto& c : check_contour_bounds(pair, q, idx, opt.threads)) {
            ++pairs;
            if (!c.holds) ++violations;
        }
    }
    return {violations == 0, fmt::format("{} violations over {} exhaustive (n<=4) + {} random (n=10^4) pairs",
                                         violations, exhaustive, pairs - exhaustive)};
}

Outcome surface_suite(const Options& opt) {
    std::vector<Quadrangulation> maps;
    for (unsigned n = 1; n <= 3; ++n) enumerate_well_labeled(n, [&](const WellLabeledTree& t) { maps.push_back(forward(t)); });
    const std::size_t small = maps.size();
    for (std::size_t s = 0; s < 20; ++s)
        maps.push_back(forward(sample_well_labeled(50, derive_seed(kMasterSeed, 50, s), SamplingMode::ExactRejection)));
    double worst_iso = 0, worst_density_excess = -1e9, worst_gh_excess = -1e9;
    for (const auto& q : maps) {
        for (unsigned m : {1u, 2u, 4u}) {
            const auto s = build_mesh(q, m);
            const double bound = 3.0 + 2.0 / m;
            worst_iso = std::max(worst_iso, verify_vertex_isometry(q, s, opt.threads));
            const auto d = verify_density_and_gh(q, s, opt.threads);
            worst_density_excess = std::max(worst_density_excess, d.density_radius - bound);
            worst_gh_excess = std::max(worst_gh_excess, d.gh_upper - bound);
        }
    }
    const bool ok = worst_iso <= 1e-9 && worst_density_excess <= 0 && worst_gh_excess <= 0;
    return {ok, fmt::format("{} maps (n<=3) + {} (n=50), m=1,2,4: isometry error {:.3g}, "
                            "max density-bound {:+.3f}, max gh-bound {:+.3f}",
                            small, maps.size() - small, worst_iso, worst_density_excess, worst_gh_excess)};
}

Outcome gh_oracle(const Options&) {
    std::mt19937_64 rng(kMasterSeed);
    std::uniform_int_distribution<std::size_t> size(1, 5);
    auto space = [&] {
        const auto n = size(rng);
        return FiniteMetricSpace::from_matrix(oracle::random_metric(n, rng), n);
    };
    constexpr double tol = 1e-12;
    std::size_t identity = 0, symmetry = 0, triangle = 0, lower = 0, two_point = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto x = space(), y = space(), z = space();
        const double xx = gh_exact_small(x, x).value;
        const double xy = gh_exact_small(x, y).value, yx = gh_exact_small(y, x).value;
        const double yz = gh_exact_small(y, z).value, xz = gh_exact_small(x, z).value;
        if (std::abs(xx) > tol) ++identity;
        if (std::abs(xy - yx) > tol) ++symmetry;
        if (xz > xy + yz + tol) ++triangle;
        if (gh_lower_bounds(x, y) > xy + tol || gh_lower_bounds(x, z) > xz + tol) ++lower;
    }
    std::uniform_int_distribution<int> w(1, 20);
    for (int k = 0; k < 200; ++k) {
        const double p = w(rng), q = w(rng);
        const std::vector<double> a{0, p, p, 0}, b{0, q, q, 0};
        const double expected = std::abs(p - q) / 2;
        const double exact = gh_exact_small(FiniteMetricSpace::from_matrix(a, 2), FiniteMetricSpace::from_matrix(b, 2)).value;
        if (std::abs(oracle::brute_force_gh(a, 2, b, 2) - expected) > tol || std::abs(exact - expected) > tol)
            ++two_point;
    }
    const bool ok = identity + symmetry + triangle + lower + two_point == 0;
    return {ok, fmt::format("failures: identity {}, symmetry {}, triangle {}, lower>exact {}, two-point {} "
                            "(1000 triples, 200 two-point pairs)",
                            identity, symmetry, triangle, lower, two_point)};
}

std::string bottleneck_csv(const Options& opt, std::size_t& total, std::size_t& dumbbell_count,
                           Distance& worst_min_side) {
    const std::size_t n = 10'000;
    ScanParams params;
    params.delta = 0.1;
    params.epsilon = 0.5;
    params.max_len = 12;
    params.threads = opt.threads;
    std::vector<ScanSummary> rows;
    total = 0;
    worst_min_side = 0;
    for (std::size_t s = 0; s < 50; ++s) {
        const auto seed = derive_seed(kMasterSeed, n, s);
        auto r = bottleneck_scan(forward(sample_well_labeled(n, seed, SamplingMode::ExactRejection)), params);
        r.summary.seed = seed;
        total += r.summary.bottlenecks;
        worst_min_side = std::max(worst_min_side, r.summary.max_min_side_diam);
        rows.push_back(r.summary);
    }
    auto d = bottleneck_scan(dumbbell(n, kMasterSeed), params);
    d.summary.seed = kMasterSeed;
    dumbbell_count = d.summary.bottlenecks;
    rows.push_back(d.summary);
    return scan_summary_csv(rows);
}

std::string scaling_csv(const Options& opt, FitResult& radius, FitResult& diam) {
    EnsembleSpec spec;
    spec.sizes = {1u << 10, 1u << 12, 1u << 14, 1u << 16, 1u << 18};
    spec.samples_per_size = 100;
    spec.seed = kMasterSeed;
    spec.mode = SamplingMode::FreeShift;
    spec.threads = opt.threads;
    const auto records = run_ensemble(spec);
    radius = fit_exponent(records, Statistic::Radius);
    diam = fit_exponent(records, Statistic::DiameterLower);
    return ensemble_csv(records);
}

std::string ancestor_csv_run(const Options& opt, double& p_small, double& p_large) {
    std::vector<AncestorRecord> all;
    double* targets[] = {&p_small, &p_large};
    int k = 0;
    for (std::size_t n : {std::size_t{1} << 10, std::size_t{1} << 14}) {
        auto recs = ancestor_geodesic_stat(n, 500, kMasterSeed, SamplingMode::ExactRejection, opt.threads);
        std::vector<double> v;
        for (const auto& r : recs) v.push_back(r.rescaled_distance);
        *targets[k++] = percentile(v, 1.0);
        all.insert(all.end(), recs.begin(), recs.end());
    }
    return ancestor_csv(all);
}

struct Artifacts {
    std::string bottleneck, scaling, ancestor;
};

Outcome bottleneck_lemma(const Options& opt, Artifacts& art) {
    std::size_t total = 0, dumb = 0;
    Distance worst = 0;
    art.bottleneck = bottleneck_csv(opt, total, dumb, worst);
    write_file(opt.out_dir / "bottleneck.csv", art.bottleneck);
    return {total == 0 && dumb >= 1,
            fmt::format("{} bottlenecks over 50 seeds at n=10^4 (need 0; largest smaller-side diameter {} vs "
                        "threshold {:.2f}); dumbbell {} (need >= 1)",
                        total, worst, 0.5 * std::pow(1e4, 0.25), dumb)};
}

Outcome scaling_exponent(const Options& opt, Artifacts& art) {
    FitResult r, d;
    art.scaling = scaling_csv(opt, r, d);
    write_file(opt.out_dir / "scaling.csv", art.scaling);
    const bool ok = r.slope >= 0.22 && r.slope <= 0.28 && d.slope >= 0.22 && d.slope <= 0.28;
    return {ok, fmt::format("radius slope {:.4f} +- {:.4f}, diameter slope {:.4f} +- {:.4f} (need [0.22, 0.28])",
                            r.slope, r.stderr_slope, d.slope, d.stderr_slope)};
}

Outcome ancestor_noncollapse(const Options& opt, Artifacts& art) {
    double p_small = 0, p_large = 0;
    art.ancestor = ancestor_csv_run(opt, p_small, p_large);
    write_file(opt.out_dir / "ancestor.csv", art.ancestor);
    return {p_large >= p_small / 2,
            fmt::format("1st percentile {:.4f} at n=2^10, {:.4f} at n=2^14 (ratio {:.3f}, need >= 0.5)", p_small,
                        p_large, p_large / p_small)};
}

Outcome determinism(const Options& opt, const Artifacts& first) {
    Options rerun = opt;
    rerun.threads = opt.threads == 1 ? 0 : 1;
    std::size_t total = 0, dumb = 0;
    Distance worst = 0;
    FitResult r, d;
    double p1 = 0, p2 = 0;
    const bool same_b = first.bottleneck.empty() || bottleneck_csv(rerun, total, dumb, worst) == first.bottleneck;
    const bool same_s = first.scaling.empty() || scaling_csv(rerun, r, d) == first.scaling;
    const bool same_a = first.ancestor.empty() || ancestor_csv_run(rerun, p1, p2) == first.ancestor;
    const bool ran_all = !first.bottleneck.empty() && !first.scaling.empty() && !first.ancestor.empty();
    return {same_b && same_s && same_a && ran_all,
            fmt::format("rerun with threads={}: bottleneck {}, scaling {}, ancestor {}", rerun.threads,
                        first.bottleneck.empty() ? "not run" : same_b ? "identical" : "DIFFERS",
                        first.scaling.empty() ? "not run" : same_s ? "identical" : "DIFFERS",
                        first.ancestor.empty() ? "not run" : same_a ? "identical" : "DIFFERS")};
}

std::set<int> parse_list(const std::string& text) {
    std::set<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc)
            opt.only = parse_list(argv[++i]);
        else if (arg == "--out-dir" && i + 1 < argc)
            opt.out_dir = argv[++i];
        else if (arg == "--threads" && i + 1 < argc)
            opt.threads = static_cast<unsigned>(std::stoul(argv[++i]));
        else {
            std::cerr << "usage: acceptance [--only 1,2,...] [--out-dir DIR] [--threads T]\n";
            return 2;
        }
    }
    std::filesystem::create_directories(opt.out_dir);

    Artifacts art;
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "counting", 10, [&] { return counting(opt); }},
        {2, "bijection roundtrip", 60, [&] { return bijection(opt, false); }},
        {3, "label/distance identity", 60, [&] { return bijection(opt, true); }},
        {4, "contour distance bound", 120, [&] { return contour_bound(opt); }},
        {5, "meshed surface suite", 300, [&] { return surface_suite(opt); }},
        {6, "GH oracle", 60, [&] { return gh_oracle(opt); }},
        {7, "bottleneck scan", 1800, [&] { return bottleneck_lemma(opt, art); }},
        {8, "scaling exponent", 1800, [&] { return scaling_exponent(opt, art); }},
        {9, "ancestor geodesic non-collapse", 600, [&] { return ancestor_noncollapse(opt, art); }},
        {10, "determinism", 4200, [&] { return determinism(opt, art); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!opt.only.empty() && !opt.only.count(c.id)) continue;
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::cout << fmt::format("{} criterion {:>2} {}: {} [{:.1f} s, limit {:.0f} s{}]\n", pass ? "PASS" : "FAIL",
                                 c.id, c.name, o.detail, secs, c.limit_seconds, in_time ? "" : ", TOO SLOW")
                  << std::flush;
    }
    std::cout << fmt::format("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
