#include <cmath>
#include <fmt/format.h>

#include "doctest.h"
#include "qmaps/error.h"
#include "qmaps/experiments.h"
#include "qmaps/metric.h"
#include "qmaps/schaeffer.h"

using namespace qmaps;

TEST_CASE("seed derivation is stable and spreads") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("spec validation") {
    EnsembleSpec spec;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.sizes = {8, 4};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.sizes = {4, 8};
    spec.samples_per_size = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.samples_per_size = 2;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("small ensemble: one record per sample, consistent statistics") {
    EnsembleSpec spec;
    spec.sizes = {4};
    spec.samples_per_size = 10;
    spec.seed = 77;
    spec.mode = SamplingMode::ExactRejection;
    const auto records = run_ensemble(spec);
    REQUIRE(records.size() == 10);
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        CHECK(r.sample == k);
        CHECK(r.radius >= 1);
        CHECK(r.radius == r.max_label);
        CHECK(r.diameter_lower >= r.radius);
        CHECK(r.diameter_lower <= 2 * r.radius);
        const auto q = forward(sample_well_labeled(4, r.seed, spec.mode));
        CHECK(r.diameter_lower <= diameter(q, DiameterMode::Exact).value);
        CHECK(r.rescaled_radius == doctest::Approx(std::pow(9.0 / 32.0, 0.25) * r.radius));
        CHECK(r.rescaled_height == doctest::Approx(r.max_height / std::sqrt(8.0)));
        CHECK(std::isfinite(r.rescaled_diameter));
        CHECK(r.rescaled_diameter > 0);
    }
}

TEST_CASE("ensemble csv is deterministic and thread independent") {
    EnsembleSpec spec;
    spec.sizes = {16, 64, 256};
    spec.samples_per_size = 8;
    spec.seed = 5;
    spec.threads = 1;
    const auto a = ensemble_csv(run_ensemble(spec));
    const auto b = ensemble_csv(run_ensemble(spec));
    spec.threads = 4;
    const auto c = ensemble_csv(run_ensemble(spec));
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.rfind("n,sample,seed,radius,diameter_lower,max_label,max_height,", 0) == 0);
    spec.seed = 6;
    CHECK(ensemble_csv(run_ensemble(spec)) != a);
}

TEST_CASE("power-law fits on synthetic data") {
    std::vector<std::pair<double, double>> quarter, flat;
    for (double n : {16.0, 256.0, 4096.0, 65536.0}) {
        quarter.emplace_back(n, std::pow(n, 0.25));
        flat.emplace_back(n, 3.5);
    }
    const auto f = fit_power_law(quarter);
    CHECK(std::abs(f.slope - 0.25) < 1e-12);
    CHECK(std::abs(f.intercept) < 1e-12);
    CHECK(f.stderr_slope < 1e-12);
    CHECK(std::abs(fit_power_law(flat).slope) < 1e-12);
    CHECK_THROWS_AS(fit_power_law(std::span(quarter).first(2)), Error);
    std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0}, {3, 1}};
    CHECK_THROWS_AS(fit_power_law(bad), Error);

    std::vector<StatRecord> records;
    for (std::size_t n : {16u, 256u, 4096u}) {
        for (int k = 0; k < 3; ++k) {
            StatRecord r;
            r.n = n;
            r.radius = static_cast<int>(std::lround(std::pow(n, 0.25))) * (k + 1);
            records.push_back(r);
        }
    }
    CHECK(fit_exponent(records, Statistic::Radius).slope == doctest::Approx(0.25));
    CHECK(parse_statistic("diameter_lower") == Statistic::DiameterLower);
    CHECK_THROWS_AS(parse_statistic("girth"), Error);
}

TEST_CASE("rescaled radius is stable across the largest sizes") {
    EnsembleSpec spec;
    spec.sizes = {1u << 10, 1u << 12, 1u << 14, 1u << 16};
    spec.samples_per_size = 100;
    spec.seed = 11;
    const auto records = run_ensemble(spec);
    auto mean_at = [&](std::size_t n) {
        double sum = 0;
        std::size_t count = 0;
        for (const auto& r : records) {
            if (r.n == n) {
                sum += r.rescaled_radius;
                ++count;
            }
        }
        return sum / count;
    };
    const double a = mean_at(1u << 14), b = mean_at(1u << 16);
    CHECK(std::abs(a - b) / b < 0.05);
    auto iqr_at = [&](std::size_t n) {
        std::vector<double> v;
        for (const auto& r : records)
            if (r.n == n) v.push_back(r.rescaled_radius);
        return percentile(v, 75) - percentile(v, 25);
    };
    const double i1 = iqr_at(1u << 12), i2 = iqr_at(1u << 14), i3 = iqr_at(1u << 16);
    CHECK(std::max({i1, i2, i3}) <= 1.5 * std::min({i1, i2, i3}));
}

TEST_CASE("ancestor pairs") {
    const auto records = ancestor_geodesic_stat(256, 30, 3);
    REQUIRE(records.size() == 30);
    for (const auto& r : records) {
        CHECK(r.distance > 0);
        CHECK(r.rescaled_distance > 0);
        CHECK(r.j - r.i >= 64);
        const auto t = sample_well_labeled(256, r.seed, SamplingMode::ExactRejection);
        CHECK(ancestor_pair_distance(t, r.i, r.j) == r.distance);
        // Distances dominate the label gap (labels are distances from x*).
        CHECK(r.distance >= r.label_gap);
    }
    CHECK(ancestor_csv(records) == ancestor_csv(ancestor_geodesic_stat(256, 30, 3, SamplingMode::ExactRejection, 3)));
    const auto t = sample_well_labeled(100, 1, SamplingMode::ExactRejection);
    CHECK_THROWS_AS(ancestor_pair_distance(t, 5, 5), Error);
    CHECK_THROWS_AS(ancestor_pair_distance(t, 7, 3), Error);
    CHECK_THROWS_AS(ancestor_geodesic_stat(32, 1, 1), Error);
}

TEST_CASE("percentiles") {
    CHECK(percentile({3, 1, 2}, 50) == 2);
    CHECK(percentile({1, 2, 3, 4}, 0) == 1);
    CHECK(percentile({1, 2, 3, 4}, 100) == 4);
    CHECK(percentile({0, 10}, 1) == doctest::Approx(0.1));
    CHECK_THROWS_AS(percentile({}, 50), Error);
}

TEST_CASE("svg output") {
    std::string csv = "n,radius\n";
    for (int n : {16, 256, 4096, 65536}) csv += fmt::format("{},{}\n", n, std::pow(n, 0.25));
    const auto svg = emit_svg(csv, PlotKind::LogLog);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("slope 0.250") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK_THROWS_AS(emit_svg("", PlotKind::LogLog), Error);
    CHECK_THROWS_AS(emit_svg("n,radius\n", PlotKind::LogLog), Error);
    CHECK_THROWS_AS(emit_svg("n,radius\n4,x\n", PlotKind::LogLog), Error);
    CHECK_THROWS_AS(emit_svg(csv, PlotKind::LogLog, "girth"), Error);

    const auto q = forward(sample_well_labeled(10000, 2, SamplingMode::FreeShift));
    const auto profile = emit_svg(profile_csv(radius_and_profile(q)), PlotKind::Profile);
    CHECK(profile.find("total mass 10002") != std::string::npos);
    CHECK(profile.find("<polyline") != std::string::npos);
}
