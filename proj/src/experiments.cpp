#include "qmaps/experiments.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <random>

#include "qmaps/error.h"
#include "qmaps/metric.h"
#include "qmaps/parallel.h"
#include "qmaps/schaeffer.h"

namespace qmaps {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(master) ^ n) ^ index);
}

void EnsembleSpec::validate() const {
    if (sizes.empty()) throw Error(ErrorCode::MalformedInput, "ensemble needs at least one size");
    if (samples_per_size == 0) throw Error(ErrorCode::MalformedInput, "ensemble needs at least one sample per size");
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) throw Error(ErrorCode::MalformedInput, "sizes must be positive");
        if (k > 0 && sizes[k] <= sizes[k - 1]) {
            throw Error(ErrorCode::MalformedInput, "sizes must be strictly increasing");
        }
    }
}

std::vector<StatRecord> run_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    const std::size_t per = spec.samples_per_size;
    std::vector<StatRecord> records(spec.sizes.size() * per);
    parallel_for(records.size(), spec.threads, [&](std::size_t job) {
        StatRecord& r = records[job];
        r.n = spec.sizes[job / per];
        r.sample = job % per;
        r.seed = derive_seed(spec.seed, r.n, r.sample);
        const auto tree = sample_well_labeled(r.n, r.seed, spec.mode);
        const auto q = forward(tree);
        const VertexGraph graph(q.map());
        const auto from_root = bfs_distances(graph, q.pointed_vertex());
        const auto far = std::max_element(from_root.begin(), from_root.end());
        r.radius = *far;
        if (spec.diameter) {
            const auto second = bfs_distances(graph, static_cast<VertexId>(far - from_root.begin()));
            r.diameter_lower = *std::max_element(second.begin(), second.end());
        }
        r.max_label = *std::max_element(tree.labels.begin(), tree.labels.end());
        for (NodeId v = 0; v < tree.tree.node_count(); ++v) {
            r.max_height = std::max<int>(r.max_height, static_cast<int>(tree.tree.depth(v)));
        }
        const double n = static_cast<double>(r.n);
        r.rescaled_radius = std::pow(9.0 / (8.0 * n), 0.25) * r.radius;
        r.rescaled_diameter = std::pow(n, -0.25) * r.diameter_lower;
        r.rescaled_height = r.max_height / std::sqrt(2.0 * n);
    });
    return records;
}

std::string ensemble_csv(std::span<const StatRecord> records) {
    std::string out =
        "n,sample,seed,radius,diameter_lower,max_label,max_height,rescaled_radius,rescaled_diameter,rescaled_height\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{:.10g},{:.10g},{:.10g}\n", r.n, r.sample, r.seed, r.radius,
                           r.diameter_lower, r.max_label, r.max_height, r.rescaled_radius, r.rescaled_diameter,
                           r.rescaled_height);
    }
    return out;
}

std::string_view to_string(Statistic s) {
    switch (s) {
        case Statistic::Radius: return "radius";
        case Statistic::DiameterLower: return "diameter_lower";
        case Statistic::MaxLabel: return "max_label";
        case Statistic::MaxHeight: return "max_height";
    }
    return "?";
}

Statistic parse_statistic(std::string_view text) {
    for (Statistic s : {Statistic::Radius, Statistic::DiameterLower, Statistic::MaxLabel, Statistic::MaxHeight}) {
        if (text == to_string(s)) return s;
    }
    throw Error(ErrorCode::MalformedInput, fmt::format("unknown statistic '{}'", text));
}

FitResult fit_power_law(std::span<const std::pair<double, double>> points) {
    std::vector<double> xs, ys;
    for (const auto& [x, y] : points) {
        if (!(x > 0) || !(y > 0)) {
            throw Error(ErrorCode::DegenerateFit, fmt::format("cannot take logs of ({}, {})", x, y));
        }
        xs.push_back(std::log(x));
        ys.push_back(std::log(y));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw Error(ErrorCode::DegenerateFit, fmt::format("need 3 distinct sizes, got {}", distinct.size()));
    }
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        mx += xs[t];
        my += ys[t];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        sxx += (xs[t] - mx) * (xs[t] - mx);
        sxy += (xs[t] - mx) * (ys[t] - my);
    }
    FitResult fit;
    fit.points = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const double e = ys[t] - (fit.intercept + fit.slope * xs[t]);
        rss += e * e;
    }
    fit.stderr_slope = xs.size() > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
    return fit;
}

FitResult fit_exponent(std::span<const StatRecord> records, Statistic statistic) {
    std::map<std::size_t, std::pair<double, std::size_t>> sums;
    for (const auto& r : records) {
        double v = 0;
        switch (statistic) {
            case Statistic::Radius: v = r.radius; break;
            case Statistic::DiameterLower: v = r.diameter_lower; break;
            case Statistic::MaxLabel: v = r.max_label; break;
            case Statistic::MaxHeight: v = r.max_height; break;
        }
        auto& [sum, count] = sums[r.n];
        sum += v;
        ++count;
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& [n, acc] : sums) points.emplace_back(static_cast<double>(n), acc.first / acc.second);
    return fit_power_law(points);
}

namespace {

// Whether x(i) is a strict ancestor of x(j) for contour times i < j.
bool strict_ancestor(const ContourPair& c, std::size_t i, std::size_t j) {
    if (i >= j || j > 2 * c.n) return false;
    const int low = *std::min_element(c.C.begin() + static_cast<std::ptrdiff_t>(i),
                                      c.C.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    return c.C[i] == low && c.C[i] < c.C[j];
}

}  // namespace

int ancestor_pair_distance(const WellLabeledTree& t, std::size_t i, std::size_t j) {
    const auto c = contour_processes(t);
    if (!strict_ancestor(c, i, j)) {
        throw Error(ErrorCode::NoValidPair,
                    fmt::format("x({}) is not a strict ancestor of x({})", i, j));
    }
    const auto q = forward(t);
    return bfs_distance(VertexGraph(q.map()), corner_vertex(q, i), corner_vertex(q, j));
}

namespace {

// Picks (i, j) per the ancestor rule; false if the tree has no valid pair.
bool pick_ancestor_pair(const ContourPair& c, std::mt19937_64& rng, std::size_t& i_out, std::size_t& j_out) {
    const std::size_t len = 2 * c.n + 1;
    const std::size_t gap = (c.n + 3) / 4;  // j - i >= n/4
    // end[i]: first time after i where C drops below C_i (len if never).
    std::vector<std::size_t> end(len, len);
    std::vector<std::size_t> stack;
    for (std::size_t t = 0; t < len; ++t) {
        while (!stack.empty() && c.C[t] < c.C[stack.back()]) {
            end[stack.back()] = t;
            stack.pop_back();
        }
        stack.push_back(t);
    }
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i + gap < len; ++i) {
        // Inside [i, end[i]) every time with C > C_i visits a strict
        // descendant of x(i).
        if (end[i] > i + gap && c.C[i + 1] > c.C[i]) starts.push_back(i);
    }
    const double threshold = std::pow(8.0 * static_cast<double>(c.n) / 9.0, 0.25);
    while (!starts.empty()) {
        std::uniform_int_distribution<std::size_t> pick_i(0, starts.size() - 1);
        const std::size_t slot = pick_i(rng);
        const std::size_t i = starts[slot];
        std::vector<std::size_t> preferred, valid;
        for (std::size_t j = i + gap; j < end[i]; ++j) {
            if (c.C[j] <= c.C[i]) continue;
            valid.push_back(j);
            if (std::abs(c.L[j] - c.L[i]) >= threshold) preferred.push_back(j);
        }
        const auto& pool = preferred.empty() ? valid : preferred;
        if (!pool.empty()) {
            std::uniform_int_distribution<std::size_t> pick_j(0, pool.size() - 1);
            i_out = i;
            j_out = pool[pick_j(rng)];
            return true;
        }
        starts.erase(starts.begin() + static_cast<std::ptrdiff_t>(slot));
    }
    return false;
}

}  // namespace

std::vector<AncestorRecord> ancestor_geodesic_stat(std::size_t n, std::size_t samples, std::uint64_t seed,
                                                   SamplingMode mode, unsigned threads) {
    if (n < 64) throw Error(ErrorCode::MalformedInput, fmt::format("ancestor statistic needs n >= 64, got {}", n));
    std::vector<AncestorRecord> records(samples);
    parallel_for(samples, threads, [&](std::size_t index) {
        AncestorRecord& r = records[index];
        r.n = n;
        r.sample = index;
        const std::uint64_t base = derive_seed(seed, n, index);
        for (std::uint64_t attempt = 0;; ++attempt) {
            r.seed = attempt == 0 ? base : derive_seed(base, attempt, 0);
            const auto tree = sample_well_labeled(n, r.seed, mode);
            const auto c = contour_processes(tree);
            std::mt19937_64 rng(derive_seed(r.seed, 0, 1));
            if (!pick_ancestor_pair(c, rng, r.i, r.j)) continue;
            const auto q = forward(tree);
            r.label_gap = std::abs(c.L[r.j] - c.L[r.i]);
            r.distance = bfs_distance(VertexGraph(q.map()), corner_vertex(q, r.i), corner_vertex(q, r.j));
            r.rescaled_distance = std::pow(static_cast<double>(n), -0.25) * r.distance;
            return;
        }
    });
    return records;
}

std::string ancestor_csv(std::span<const AncestorRecord> records) {
    std::string out = "n,sample,seed,i,j,label_gap,distance,rescaled_distance\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{:.10g}\n", r.n, r.sample, r.seed, r.i, r.j, r.label_gap, r.distance,
                           r.rescaled_distance);
    }
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw Error(ErrorCode::MalformedInput, "percentile of an empty sample");
    if (!(p >= 0 && p <= 100)) throw Error(ErrorCode::MalformedInput, "percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::MalformedCSV, fmt::format("no column '{}'", name));
        return static_cast<std::size_t>(it - header.begin());
    }
};

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

Table parse_csv(std::string_view text) {
    Table table;
    std::size_t line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (table.header.empty()) {
            table.header.assign(cells.begin(), cells.end());
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorCode::MalformedCSV, fmt::format("line {}: expected {} fields, got {}", line_no,
                                                             table.header.size(), cells.size()));
        }
        std::vector<double> row;
        for (auto cell : cells) {
            double v = 0;
            const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || end != cell.data() + cell.size()) {
                throw Error(ErrorCode::MalformedCSV, fmt::format("line {}: not a number '{}'", line_no, cell));
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty() || table.rows.empty()) throw Error(ErrorCode::MalformedCSV, "no data rows");
    return table;
}

class SvgCanvas {
public:
    SvgCanvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
        if (x1_ <= x0_) x1_ = x0_ + 1;
        if (y1_ <= y0_) y1_ = y0_ + 1;
    }

    double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

    void axes(std::string_view xlabel, std::string_view ylabel, std::string_view xfmt_lo, std::string_view xfmt_hi,
              std::string_view yfmt_lo, std::string_view yfmt_hi) {
        body_ += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)"
                             "\n",
                             kLeft, kHeight - kBottom, kWidth - kRight);
        body_ += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)"
                             "\n",
                             kLeft, kTop, kHeight - kBottom);
        text(kLeft, kHeight - kBottom + 18, xfmt_lo, "middle");
        text(kWidth - kRight, kHeight - kBottom + 18, xfmt_hi, "middle");
        text(kLeft - 6, kHeight - kBottom, yfmt_lo, "end");
        text(kLeft - 6, kTop + 4, yfmt_hi, "end");
        text((kLeft + kWidth - kRight) / 2, kHeight - 12, xlabel, "middle");
        text(16, kTop - 10, ylabel, "start");
    }

    void text(double x, double y, std::string_view s, std::string_view anchor = "start") {
        body_ += fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-family="sans-serif" font-size="13" )"
                             R"(text-anchor="{}">{}</text>)"
                             "\n",
                             x, y, anchor, s);
    }
    void point(double x, double y) {
        body_ += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="4" fill="steelblue"/>)"
                             "\n",
                             px(x), py(y));
    }
    void line(double xa, double ya, double xb, double yb, std::string_view colour) {
        body_ += fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"/>)"
                             "\n",
                             px(xa), py(ya), px(xb), py(yb), colour);
    }
    void polyline(const std::vector<std::pair<double, double>>& pts) {
        std::string coords;
        for (const auto& [x, y] : pts) coords += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
        if (!coords.empty()) coords.pop_back();
        body_ += fmt::format(R"(<polyline points="{}" fill="none" stroke="steelblue"/>)"
                             "\n",
                             coords);
    }

    std::string finish() const {
        return fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)"
                           "\n"
                           R"(<rect width="100%" height="100%" fill="white"/>)"
                           "\n{}</svg>\n",
                           kWidth, kHeight, kWidth, kHeight, body_);
    }

private:
    static constexpr double kWidth = 640, kHeight = 480, kLeft = 70, kRight = 30, kTop = 40, kBottom = 50;
    double x0_, x1_, y0_, y1_;
    std::string body_;
};

}  // namespace

std::string emit_svg(std::string_view csv, PlotKind kind, std::string_view column) {
    const Table table = parse_csv(csv);
    if (kind == PlotKind::Profile) {
        const std::size_t dc = table.column("distance"), cc = table.column("count");
        std::vector<std::pair<double, double>> pts;
        double mass = 0, dmax = 0, cmax = 0;
        for (const auto& row : table.rows) {
            pts.emplace_back(row[dc], row[cc]);
            mass += row[cc];
            dmax = std::max(dmax, row[dc]);
            cmax = std::max(cmax, row[cc]);
        }
        SvgCanvas canvas(0, dmax, 0, cmax);
        canvas.axes("distance from pointed vertex", "vertices", "0", fmt::format("{}", dmax), "0",
                    fmt::format("{}", cmax));
        canvas.polyline(pts);
        canvas.text(canvas.px(dmax) - 4, 60, fmt::format("total mass {}", mass), "end");
        return canvas.finish();
    }

    const std::size_t nc = table.column("n"), vc = table.column(column);
    std::map<double, std::pair<double, std::size_t>> sums;
    for (const auto& row : table.rows) {
        auto& [sum, count] = sums[row[nc]];
        sum += row[vc];
        ++count;
    }
    std::vector<std::pair<double, double>> means;
    for (const auto& [n, acc] : sums) means.emplace_back(n, acc.first / acc.second);
    FitResult fit;
    try {
        fit = fit_power_law(means);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedCSV, e.what());
    }
    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    for (const auto& [n, m] : means) {
        lx0 = std::min(lx0, std::log10(n));
        lx1 = std::max(lx1, std::log10(n));
        ly0 = std::min(ly0, std::log10(m));
        ly1 = std::max(ly1, std::log10(m));
    }
    const double pad = 0.05 * std::max(ly1 - ly0, 0.1);
    ly0 -= pad;
    ly1 += pad;
    SvgCanvas canvas(lx0, lx1, ly0, ly1);
    canvas.axes("log10 n", fmt::format("log10 mean {}", column), fmt::format("{:.2f}", lx0), fmt::format("{:.2f}", lx1),
                fmt::format("{:.2f}", ly0), fmt::format("{:.2f}", ly1));
    // Fitted line in log10 coordinates (slope is base independent).
    const double b10 = fit.intercept / std::log(10.0);
    canvas.line(lx0, b10 + fit.slope * lx0, lx1, b10 + fit.slope * lx1, "firebrick");
    for (const auto& [n, m] : means) canvas.point(std::log10(n), std::log10(m));
    canvas.text(canvas.px(lx0) + 10, 60, fmt::format("slope {:.3f}", fit.slope));
    return canvas.finish();
}

}  // namespace qmaps
