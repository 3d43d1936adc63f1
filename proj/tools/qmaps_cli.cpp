#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qmaps/error.h"
#include "qmaps/experiments.h"
#include "qmaps/gh.h"
#include "qmaps/map_core.h"
#include "qmaps/metric.h"
#include "qmaps/parallel.h"
#include "qmaps/regularity.h"
#include "qmaps/schaeffer.h"
#include "qmaps/surface.h"
#include "qmaps/trees.h"

#ifndef QMAPS_VERSION
#define QMAPS_VERSION "unknown"
#endif

namespace {

using namespace qmaps;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

constexpr int kDistanceMatrixFormatVersion = 1;
constexpr int kTreeTextFormatVersion = 1;
constexpr int kMeshFormatVersion = 1;
constexpr int kCsvSchemaVersion = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file and renames it over the target, so a
/// failed run never leaves a partial file behind.
void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += fmt::format(".tmp{}", static_cast<unsigned long>(std::random_device{}()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError(fmt::format("cannot write '{}'", path));
        out << text;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw UsageError(fmt::format("write to '{}' failed", path));
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw UsageError(fmt::format("cannot rename onto '{}'", path));
    }
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-")
        std::cout << text << std::flush;
    else
        write_atomic(out_path, text);
}

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) return fmt::format("{:.1f}", v);
    return fmt::format("{}", v);
}

/// Map JSON if the text starts with '{', tree text otherwise.
Quadrangulation load_quadrangulation(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        auto doc = deserialize(text);
        return Quadrangulation::from_map(std::move(doc.map), doc.pointed_vertex);
    }
    return forward(parse_tree_text(text));
}

struct Global {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool json = false;
    bool csv = false;
    std::string out;
};

// ---------------------------------------------------------------- sample

struct SampleArgs {
    std::size_t n = 0;
    std::string mode = "exact-rejection";
    std::string format = "map";
};

int run_sample(const Global& g, const SampleArgs& a) {
    const auto mode = parse_sampling_mode(a.mode);
    std::string format = a.format;
    if (g.csv) format = "contour";
    if (g.json) format = "map";
    const auto t = sample_well_labeled(a.n, g.seed, mode);
    if (format == "tree")
        emit(g.out, to_text(t));
    else if (format == "contour")
        emit(g.out, contour_csv(contour_processes(t)));
    else
        emit(g.out, serialize(forward(t)) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------- enumerate

int run_enumerate(const Global& g, unsigned n) {
    if (n < 1 || n > kMaxEnumerationSize)
        throw UsageError(fmt::format("--n must lie in [1, {}]", kMaxEnumerationSize));
    std::size_t trees = 0;
    std::set<std::vector<std::uint32_t>> codes;
    enumerate_well_labeled(n, [&](const WellLabeledTree& t) {
        ++trees;
        codes.insert(rooted_canonical_code(forward(t).map()));
    });
    const auto formula = well_labeled_count(n);
    const bool ok = trees == formula && codes.size() == formula;
    if (g.json) {
        json doc;
        doc["n"] = n;
        doc["well_labeled_trees"] = trees;
        doc["distinct_quadrangulations"] = codes.size();
        doc["formula"] = formula;
        doc["match"] = ok;
        emit(g.out, doc.dump(2) + "\n");
    } else if (g.csv) {
        emit(g.out, fmt::format("n,well_labeled_trees,distinct_quadrangulations,formula\n{},{},{},{}\n", n, trees,
                                codes.size(), formula));
    } else {
        emit(g.out, fmt::format("{}\n", codes.size()));
    }
    if (!ok)
        std::cerr << fmt::format("count mismatch: {} trees, {} maps, formula {}\n", trees, codes.size(), formula);
    return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::size_t n = 0;
    bool exhaustive = false;
    std::size_t samples = 100;
    std::size_t pairs = 1000;
    std::string mode = "exact-rejection";
};

struct VerifyTally {
    std::size_t objects = 0;
    std::size_t roundtrip_failures = 0;
    std::size_t label_failures = 0;
    std::size_t topology_failures = 0;
    std::size_t bound_pairs = 0;
    std::size_t bound_failures = 0;
};

void verify_one(const WellLabeledTree& t, bool all_pairs, std::size_t pairs, std::uint64_t seed, unsigned threads,
                VerifyTally& tally) {
    ++tally.objects;
    const auto q = forward(t);
    if (!(reverse(q) == t)) ++tally.roundtrip_failures;
    const auto& map = q.map();
    if (map.euler_characteristic() != 2 || !map.is_bipartite() || q.size() != t.size() ||
        q.vertex_count() != t.size() + 2)
        ++tally.topology_failures;

    const auto pair = contour_processes(t);
    const auto dist = distance_labels(q);
    for (std::size_t i = 0; i <= 2 * t.size(); ++i)
        if (dist[corner_vertex(q, i)] != pair.L[i]) {
            ++tally.label_failures;
            break;
        }

    std::vector<std::pair<std::size_t, std::size_t>> idx;
    const std::size_t len = 2 * t.size();
    if (all_pairs) {
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = i + 1; j <= len; ++j) idx.emplace_back(i, j);
    } else if (len >= 1) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, len);
        while (idx.size() < pairs) {
            auto i = pick(rng), j = pick(rng);
            if (i == j) continue;
            idx.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    for (const auto& c : check_contour_bounds(pair, q, idx, threads)) {
        ++tally.bound_pairs;
        if (!c.holds) ++tally.bound_failures;
    }
}

int run_verify(const Global& g, const VerifyArgs& a) {
    if (a.n < 1) throw UsageError("--n must be positive");
    VerifyTally tally;
    if (a.exhaustive) {
        if (a.n > kMaxEnumerationSize)
            throw UsageError(fmt::format("--exhaustive needs --n <= {}", kMaxEnumerationSize));
        enumerate_well_labeled(static_cast<unsigned>(a.n),
                               [&](const WellLabeledTree& t) { verify_one(t, true, 0, 0, g.threads, tally); });
    } else {
        const auto mode = parse_sampling_mode(a.mode);
        for (std::size_t s = 0; s < a.samples; ++s) {
            const auto seed = derive_seed(g.seed, a.n, s);
            verify_one(sample_well_labeled(a.n, seed, mode), false, a.pairs, seed ^ 0x5bd1e995u, g.threads, tally);
        }
    }
    const bool ok = tally.roundtrip_failures == 0 && tally.label_failures == 0 && tally.topology_failures == 0 &&
                    tally.bound_failures == 0;
    if (g.json) {
        json doc;
        doc["n"] = a.n;
        doc["objects"] = tally.objects;
        doc["roundtrip_failures"] = tally.roundtrip_failures;
        doc["label_failures"] = tally.label_failures;
        doc["topology_failures"] = tally.topology_failures;
        doc["bound_pairs"] = tally.bound_pairs;
        doc["bound_failures"] = tally.bound_failures;
        doc["ok"] = ok;
        emit(g.out, doc.dump(2) + "\n");
    } else if (g.csv) {
        emit(g.out, fmt::format("n,objects,roundtrip_failures,label_failures,topology_failures,bound_pairs,"
                                "bound_failures\n{},{},{},{},{},{},{}\n",
                                a.n, tally.objects, tally.roundtrip_failures, tally.label_failures,
                                tally.topology_failures, tally.bound_pairs, tally.bound_failures));
    } else {
        emit(g.out, fmt::format("{} {} objects at n={}: roundtrip failures {}, label failures {}, "
                                "euler/bipartite failures {}, bound failures {} of {} pairs\n",
                                ok ? "OK" : "FAILED", tally.objects, a.n, tally.roundtrip_failures,
                                tally.label_failures, tally.topology_failures, tally.bound_failures,
                                tally.bound_pairs));
    }
    return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- surface-check

struct SurfaceArgs {
    std::size_t n = 0;
    std::vector<unsigned> resolutions{1, 2, 4};
    bool exhaustive = false;
    std::size_t samples = 1;
    std::string mode = "exact-rejection";
    std::string input;
    std::string mesh_out;
    double tolerance = 1e-9;
};

int run_surface_check(const Global& g, const SurfaceArgs& a) {
    for (auto m : a.resolutions)
        if (m == 0) throw UsageError("--m values must be positive");
    std::vector<Quadrangulation> maps;
    if (!a.input.empty()) {
        maps.push_back(load_quadrangulation(read_file(a.input)));
    } else {
        if (a.n < 1) throw UsageError("--n or an input map is required");
        if (a.exhaustive) {
            if (a.n > kMaxEnumerationSize)
                throw UsageError(fmt::format("--exhaustive needs --n <= {}", kMaxEnumerationSize));
            enumerate_well_labeled(static_cast<unsigned>(a.n),
                                   [&](const WellLabeledTree& t) { maps.push_back(forward(t)); });
        } else {
            const auto mode = parse_sampling_mode(a.mode);
            for (std::size_t s = 0; s < a.samples; ++s)
                maps.push_back(forward(sample_well_labeled(a.n, derive_seed(g.seed, a.n, s), mode)));
        }
    }

    std::vector<SurfaceReport> rows;
    bool ok = true;
    for (const auto& q : maps) {
        for (auto m : a.resolutions) {
            const auto s = build_mesh(q, m);
            SurfaceReport r;
            r.n = q.size();
            r.m = m;
            r.max_isometry_error = verify_vertex_isometry(q, s, g.threads);
            const auto d = verify_density_and_gh(q, s, g.threads);
            r.density_radius = d.density_radius;
            r.gh_upper = d.gh_upper;
            const double bound = 3.0 + 2.0 / m;
            if (r.max_isometry_error > a.tolerance || r.density_radius > bound + a.tolerance ||
                r.gh_upper > bound + a.tolerance || s.euler_characteristic() != 2)
                ok = false;
            rows.push_back(r);
        }
    }
    if (!a.mesh_out.empty() && !maps.empty()) write_atomic(a.mesh_out, export_mesh(build_mesh(maps.front(), a.resolutions.front())));

    if (g.json) {
        json doc = json::array();
        for (const auto& r : rows)
            doc.push_back({{"n", r.n},
                           {"m", r.m},
                           {"max_isometry_error", r.max_isometry_error},
                           {"density_radius", r.density_radius},
                           {"gh_upper", r.gh_upper}});
        emit(g.out, doc.dump(2) + "\n");
    } else {
        emit(g.out, surface_report_csv(rows));
    }
    if (!ok) std::cerr << "surface check failed\n";
    return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- gh

struct GhArgs {
    std::string a, b;
    bool lower_only = false;
};

int run_gh(const Global& g, const GhArgs& args) {
    const auto a = parse_distance_matrix(read_file(args.a));
    const auto b = parse_distance_matrix(read_file(args.b));
    const bool exact = !args.lower_only && a.size() <= kMaxExactGhPoints && b.size() <= kMaxExactGhPoints;
    const double lower = gh_lower_bounds(a, b);
    double value = lower;
    std::vector<std::pair<std::size_t, std::size_t>> witness;
    if (exact) {
        auto r = gh_exact_small(a, b, g.threads == 0 ? resolve_threads(0) : g.threads);
        value = r.value;
        witness = r.witness.pairs;
    }
    if (g.json) {
        json doc;
        doc["value"] = value;
        doc["exact"] = exact;
        doc["lower_bound"] = lower;
        if (exact) doc["witness"] = witness;
        emit(g.out, doc.dump(2) + "\n");
    } else if (g.csv) {
        emit(g.out, fmt::format("value,exact,lower_bound\n{},{},{}\n", format_number(value), exact ? 1 : 0,
                                format_number(lower)));
    } else {
        emit(g.out, exact ? format_number(value) + "\n" : fmt::format("{} (lower bound)\n", format_number(value)));
    }
    return kExitOk;
}

// ---------------------------------------------------------------- loops

struct LoopsArgs {
    std::size_t n = 0;
    std::size_t samples = 1;
    unsigned max_len = 12;
    double delta = 0.1;
    double epsilon = 0.5;
    std::string mode = "exact-rejection";
    bool dumbbell = false;
    bool require_zero = false;
    std::string cycles_out;
};

int run_loops(const Global& g, const LoopsArgs& a) {
    if (a.n < 1) throw UsageError("--n must be positive");
    if (a.max_len < 2 || a.max_len > kMaxCycleLength)
        throw UsageError(fmt::format("--K must lie in [2, {}]", kMaxCycleLength));
    if (a.delta <= 0 || a.epsilon <= 0) throw UsageError("--delta and --epsilon must be positive");
    const auto mode = parse_sampling_mode(a.mode);
    ScanParams params;
    params.delta = a.delta;
    params.epsilon = a.epsilon;
    params.max_len = a.max_len;
    params.threads = g.threads;

    std::vector<ScanSummary> rows;
    json cycles = json::array();
    for (std::size_t s = 0; s < a.samples; ++s) {
        const std::uint64_t seed = a.samples == 1 ? g.seed : derive_seed(g.seed, a.n, s);
        const auto q = a.dumbbell ? dumbbell(a.n, seed) : forward(sample_well_labeled(a.n, seed, mode));
        auto result = bottleneck_scan(q, params);
        result.summary.seed = seed;
        rows.push_back(result.summary);
        if (!a.cycles_out.empty() || g.json) {
            json entry;
            entry["seed"] = seed;
            entry["cycles"] = json::parse(cycle_reports_json(result.reports));
            cycles.push_back(std::move(entry));
        }
    }
    if (!a.cycles_out.empty()) write_atomic(a.cycles_out, cycles.dump(2) + "\n");
    if (g.json) {
        json doc = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            doc.push_back({{"n", r.n},
                           {"seed", r.seed},
                           {"K", r.max_len},
                           {"delta", r.delta},
                           {"epsilon", r.epsilon},
                           {"cycles_scanned", r.cycles_scanned},
                           {"bottlenecks", r.bottlenecks},
                           {"max_min_side_diam", r.max_min_side_diam},
                           {"cycles", cycles[i]["cycles"]}});
        }
        emit(g.out, doc.dump(2) + "\n");
    } else {
        emit(g.out, scan_summary_csv(rows));
    }
    if (a.require_zero) {
        for (const auto& r : rows)
            if (r.bottlenecks != 0) {
                std::cerr << fmt::format("seed {}: {} bottleneck cycles\n", r.seed, r.bottlenecks);
                return kExitCheckFailed;
            }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- scaling

struct ScalingArgs {
    std::vector<std::size_t> sizes;
    std::size_t samples = 100;
    std::string mode = "free-shift";
    std::string statistic = "radius";
    std::string svg;
    bool no_diameter = false;
    bool ancestor = false;
    double slope_min = -1;
    double slope_max = -1;
};

int run_scaling(const Global& g, const ScalingArgs& a) {
    if (a.sizes.empty()) throw UsageError("--sizes is required");
    if (a.samples < 1) throw UsageError("--samples must be positive");
    const auto mode = parse_sampling_mode(a.mode);

    if (a.ancestor) {
        std::vector<AncestorRecord> all;
        for (auto n : a.sizes) {
            auto recs = ancestor_geodesic_stat(n, a.samples, g.seed, mode, g.threads);
            std::vector<double> values;
            for (const auto& r : recs) values.push_back(r.rescaled_distance);
            std::cerr << fmt::format("n={} p1={:.6f} p50={:.6f}\n", n, percentile(values, 1.0),
                                     percentile(values, 50.0));
            all.insert(all.end(), recs.begin(), recs.end());
        }
        emit(g.out, ancestor_csv(all));
        return kExitOk;
    }

    EnsembleSpec spec;
    spec.sizes = a.sizes;
    spec.samples_per_size = a.samples;
    spec.seed = g.seed;
    spec.mode = mode;
    spec.diameter = !a.no_diameter;
    spec.threads = g.threads;
    spec.validate();
    const auto statistic = parse_statistic(a.statistic);
    const auto records = run_ensemble(spec);
    const auto csv = ensemble_csv(records);
    const auto fit = fit_exponent(records, statistic);
    std::cerr << fmt::format("{} slope {:.4f} +- {:.4f} over {} sizes\n", to_string(statistic), fit.slope,
                             fit.stderr_slope, fit.points);
    if (g.json) {
        json doc;
        doc["statistic"] = std::string(to_string(statistic));
        doc["slope"] = fit.slope;
        doc["intercept"] = fit.intercept;
        doc["stderr_slope"] = fit.stderr_slope;
        doc["points"] = fit.points;
        emit(g.out, doc.dump(2) + "\n");
    } else {
        emit(g.out, csv);
    }
    if (!a.svg.empty()) write_atomic(a.svg, emit_svg(csv, PlotKind::LogLog, to_string(statistic)));
    if (a.slope_min >= 0 && a.slope_max >= 0 && (fit.slope < a.slope_min || fit.slope > a.slope_max))
        return kExitCheckFailed;
    return kExitOk;
}

// ---------------------------------------------------------------- schaeffer / convert

int run_schaeffer(const Global& g, const std::string& direction, const std::string& input) {
    const auto text = read_file(input);
    if (direction == "forward") {
        emit(g.out, serialize(forward(parse_tree_text(text))) + "\n");
    } else {
        auto doc = deserialize(text);
        emit(g.out, to_text(reverse(Quadrangulation::from_map(std::move(doc.map), doc.pointed_vertex))));
    }
    return kExitOk;
}

struct ConvertArgs {
    std::string input;
    std::string to = "map";
    unsigned m = 1;
};

int run_convert(const Global& g, const ConvertArgs& a) {
    const auto q = load_quadrangulation(read_file(a.input));
    if (a.to == "map")
        emit(g.out, serialize(q) + "\n");
    else if (a.to == "tree")
        emit(g.out, to_text(reverse(q)));
    else if (a.to == "contour")
        emit(g.out, contour_csv(contour_processes(reverse(q))));
    else if (a.to == "profile")
        emit(g.out, profile_csv(radius_and_profile(q)));
    else if (a.to == "mesh") {
        if (a.m == 0) throw UsageError("--m must be positive");
        emit(g.out, export_mesh(build_mesh(q, a.m)));
    } else if (a.to == "dist") {
        emit(g.out, to_distance_matrix_text(FiniteMetricSpace::from_graph(q.map())));
    }
    return kExitOk;
}

std::string version_text() {
    return fmt::format(
        "qmaps {}\nmap-json schema {}\ntree-text format {}\ndistance-matrix format {}\nmesh format {}\n"
        "csv schema {}",
        QMAPS_VERSION, kMapSchemaVersion, kTreeTextFormatVersion, kDistanceMatrixFormatVersion, kMeshFormatVersion,
        kCsvSchemaVersion);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random planar quadrangulations: sampling, bijection checks, metrics and scaling experiments"};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    auto* json_flag = app.add_flag("--json", g.json, "JSON output");
    app.add_flag("--csv", g.csv, "CSV output")->excludes(json_flag);
    app.add_option("--out,-o", g.out, "Output file (written atomically; default stdout)");

    const std::vector<std::string> modes{"exact-rejection", "free-shift"};

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Sample a well-labeled tree and its quadrangulation");
    sample_cmd->add_option("--n", sample.n, "Number of faces")->required()->check(CLI::PositiveNumber);
    sample_cmd->add_option("--mode", sample.mode)->check(CLI::IsMember(modes))->capture_default_str();
    sample_cmd->add_option("--format", sample.format, "map | tree | contour")
        ->check(CLI::IsMember({"map", "tree", "contour"}))
        ->capture_default_str();

    unsigned enum_n = 0;
    auto* enumerate_cmd = app.add_subcommand("enumerate", "Count quadrangulations with n faces by full census");
    enumerate_cmd->add_option("--n", enum_n)->required();

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Roundtrip, label, contour-bound and topology checks");
    verify_cmd->add_option("--n", verify.n)->required();
    verify_cmd->add_flag("--exhaustive", verify.exhaustive, "Every well-labeled tree of size n, all index pairs");
    verify_cmd->add_option("--samples", verify.samples)->capture_default_str();
    verify_cmd->add_option("--pairs", verify.pairs, "Random index pairs per sample")->capture_default_str();
    verify_cmd->add_option("--mode", verify.mode)->check(CLI::IsMember(modes))->capture_default_str();

    SurfaceArgs surface;
    auto* surface_cmd = app.add_subcommand("surface-check", "Meshed surface isometry, density and GH checks");
    surface_cmd->add_option("input", surface.input, "Map JSON or tree text (instead of sampling)");
    surface_cmd->add_option("--n", surface.n);
    surface_cmd->add_option("--m", surface.resolutions, "Resolutions")->capture_default_str();
    surface_cmd->add_flag("--exhaustive", surface.exhaustive);
    surface_cmd->add_option("--samples", surface.samples)->capture_default_str();
    surface_cmd->add_option("--mode", surface.mode)->check(CLI::IsMember(modes))->capture_default_str();
    surface_cmd->add_option("--tolerance", surface.tolerance)->capture_default_str();
    surface_cmd->add_option("--mesh-out", surface.mesh_out, "Export the first mesh");

    GhArgs gh;
    auto* gh_cmd = app.add_subcommand("gh", "Gromov-Hausdorff distance between two distance matrices");
    gh_cmd->add_option("a", gh.a)->required();
    gh_cmd->add_option("b", gh.b)->required();
    gh_cmd->add_flag("--lower-bound", gh.lower_only, "Skip the exact search");

    LoopsArgs loops;
    auto* loops_cmd = app.add_subcommand("loops", "Scan short cycles for bottlenecks");
    loops_cmd->add_option("--n", loops.n)->required();
    loops_cmd->add_option("--samples", loops.samples)->capture_default_str();
    loops_cmd->add_option("--K", loops.max_len, "Longest cycle length")->capture_default_str();
    loops_cmd->add_option("--delta", loops.delta)->capture_default_str();
    loops_cmd->add_option("--epsilon", loops.epsilon)->capture_default_str();
    loops_cmd->add_option("--mode", loops.mode)->check(CLI::IsMember(modes))->capture_default_str();
    loops_cmd->add_flag("--dumbbell", loops.dumbbell, "Scan two halves glued along an edge");
    loops_cmd->add_flag("--require-zero", loops.require_zero, "Exit 1 if any bottleneck is found");
    loops_cmd->add_option("--cycles-out", loops.cycles_out, "Per-cycle JSON report");

    ScalingArgs scaling;
    auto* scaling_cmd = app.add_subcommand("scaling", "Ensemble statistics and power-law fits");
    scaling_cmd->add_option("--sizes", scaling.sizes)->required()->delimiter(',');
    scaling_cmd->add_option("--samples", scaling.samples)->capture_default_str();
    scaling_cmd->add_option("--mode", scaling.mode)->check(CLI::IsMember(modes))->capture_default_str();
    scaling_cmd->add_option("--statistic", scaling.statistic)
        ->check(CLI::IsMember({"radius", "diameter_lower", "max_label", "max_height"}))
        ->capture_default_str();
    scaling_cmd->add_option("--svg", scaling.svg, "Log-log plot path");
    scaling_cmd->add_flag("--no-diameter", scaling.no_diameter);
    scaling_cmd->add_flag("--ancestor", scaling.ancestor, "Distances between ancestor corners instead");
    scaling_cmd->add_option("--slope-min", scaling.slope_min);
    scaling_cmd->add_option("--slope-max", scaling.slope_max);

    std::string direction, schaeffer_input;
    auto* schaeffer_cmd = app.add_subcommand("schaeffer", "Apply the bijection in either direction");
    schaeffer_cmd->add_option("direction", direction)->required()->check(CLI::IsMember({"forward", "reverse"}));
    schaeffer_cmd->add_option("input", schaeffer_input, "Tree text (forward) or map JSON (reverse)")->required();

    ConvertArgs convert;
    auto* convert_cmd = app.add_subcommand("convert", "Convert a map or tree between formats");
    convert_cmd->add_option("input", convert.input)->required();
    convert_cmd->add_option("--to", convert.to, "map | tree | contour | profile | mesh | dist")
        ->check(CLI::IsMember({"map", "tree", "contour", "profile", "mesh", "dist"}))
        ->capture_default_str();
    convert_cmd->add_option("--m", convert.m)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sample_cmd) return run_sample(g, sample);
        if (*enumerate_cmd) return run_enumerate(g, enum_n);
        if (*verify_cmd) return run_verify(g, verify);
        if (*surface_cmd) return run_surface_check(g, surface);
        if (*gh_cmd) return run_gh(g, gh);
        if (*loops_cmd) return run_loops(g, loops);
        if (*scaling_cmd) return run_scaling(g, scaling);
        if (*schaeffer_cmd) return run_schaeffer(g, direction, schaeffer_input);
        if (*convert_cmd) return run_convert(g, convert);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::SplitFailed:
            case ErrorCode::BudgetExceeded:
                return kExitCheckFailed;
            default:
                return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
