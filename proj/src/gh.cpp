#include "qmaps/gh.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <mutex>

#include "qmaps/error.h"
#include "qmaps/parallel.h"

namespace qmaps {

bool Correspondence::covers() const {
    std::vector<bool> in_a(a_size, false), in_b(b_size, false);
    for (const auto& [x, y] : pairs) {
        if (x >= a_size || y >= b_size) return false;
        in_a[x] = true;
        in_b[y] = true;
    }
    return std::all_of(in_a.begin(), in_a.end(), [](bool v) { return v; }) &&
           std::all_of(in_b.begin(), in_b.end(), [](bool v) { return v; });
}

Correspondence Correspondence::identity(std::size_t n) {
    Correspondence r{n, n, {}};
    for (std::size_t i = 0; i < n; ++i) r.pairs.emplace_back(i, i);
    return r;
}

Correspondence Correspondence::full(std::size_t a_size, std::size_t b_size) {
    Correspondence r{a_size, b_size, {}};
    for (std::size_t i = 0; i < a_size; ++i) {
        for (std::size_t j = 0; j < b_size; ++j) r.pairs.emplace_back(i, j);
    }
    return r;
}

double distortion(const Correspondence& r, const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
    if (r.a_size != a.size() || r.b_size != b.size() || !r.covers()) {
        throw Error(ErrorCode::NotCovering, "relation does not cover both spaces");
    }
    double worst = 0;
    for (const auto& [x, y] : r.pairs) {
        for (const auto& [x2, y2] : r.pairs) {
            worst = std::max(worst, std::abs(a.distance(x, x2) - b.distance(y, y2)));
        }
    }
    return worst;
}

namespace {

struct Incumbent {
    std::mutex mutex;
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

class ExactSearch {
public:
    ExactSearch(const FiniteMetricSpace& a, const FiniteMetricSpace& b)
        : na_(a.size()), nb_(b.size()), da_(a.to_matrix()), db_(b.to_matrix()) {}

    std::size_t na() const { return na_; }
    std::size_t nb() const { return nb_; }

    // Explores every relation whose first pair is (0, first), sharing the
    // incumbent through `best`.
    void run_branch(std::size_t first, std::atomic<double>& best, Incumbent& incumbent) const {
        State st;
        st.best = &best;
        st.incumbent = &incumbent;
        st.b_count.assign(nb_, 0);
        push(st, 0, first);
        assign_a(st, 1, 0.0);
    }

private:
    struct State {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        std::vector<int> b_count;
        std::atomic<double>* best;
        Incumbent* incumbent;
    };

    double added_cost(const State& st, std::size_t x, std::size_t y) const {
        double worst = 0;
        for (const auto& [x2, y2] : st.pairs) {
            worst = std::max(worst, std::abs(da_[x * na_ + x2] - db_[y * nb_ + y2]));
        }
        return worst;
    }

    void push(State& st, std::size_t x, std::size_t y) const {
        st.pairs.emplace_back(x, y);
        ++st.b_count[y];
    }
    void pop(State& st) const {
        --st.b_count[st.pairs.back().second];
        st.pairs.pop_back();
    }

    void record(State& st, double cost) const {
        {
            std::lock_guard lock(st.incumbent->mutex);
            if (cost < st.incumbent->cost) {
                st.incumbent->cost = cost;
                st.incumbent->pairs = st.pairs;
            }
        }
        double current = st.best->load();
        while (cost < current && !st.best->compare_exchange_weak(current, cost)) {
        }
    }

    void assign_a(State& st, std::size_t x, double cost) const {
        if (x == na_) {
            cover_b(st, 0, cost);
            return;
        }
        for (std::size_t y = 0; y < nb_; ++y) {
            const double c = std::max(cost, added_cost(st, x, y));
            if (c >= st.best->load()) continue;
            push(st, x, y);
            assign_a(st, x + 1, c);
            pop(st);
        }
    }

    void cover_b(State& st, std::size_t y, double cost) const {
        while (y < nb_ && st.b_count[y] > 0) ++y;
        if (y == nb_) {
            record(st, cost);
            return;
        }
        for (std::size_t x = 0; x < na_; ++x) {
            const double c = std::max(cost, added_cost(st, x, y));
            if (c >= st.best->load()) continue;
            push(st, x, y);
            cover_b(st, y + 1, c);
            pop(st);
        }
    }

    std::size_t na_, nb_;
    std::vector<double> da_, db_;
};

}  // namespace

GhResult gh_exact_small(const FiniteMetricSpace& a, const FiniteMetricSpace& b, unsigned threads) {
    if (a.size() > kMaxExactGhPoints || b.size() > kMaxExactGhPoints) {
        throw Error(ErrorCode::SizeTooLarge,
                    fmt::format("exact search limited to {} points, got {} and {}", kMaxExactGhPoints, a.size(),
                                b.size()));
    }
    if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::MalformedInput, "empty metric space");
    // The full relation is always feasible; start just above its distortion
    // so the search finds a witness.
    const Correspondence all = Correspondence::full(a.size(), b.size());
    const double start = distortion(all, a, b);
    GhResult result{start / 2, all};
    std::atomic<double> best{std::nextafter(start, std::numeric_limits<double>::infinity())};
    Incumbent incumbent;
    const ExactSearch search(a, b);
    parallel_for(b.size(), threads, [&](std::size_t first) { search.run_branch(first, best, incumbent); });
    if (!incumbent.pairs.empty()) {
        result.witness.pairs = incumbent.pairs;
        result.value = incumbent.cost / 2;
    }
    return result;
}

namespace {

// Hausdorff distance between two finite sets of reals, both sorted.
double hausdorff_sorted(const std::vector<double>& x, const std::vector<double>& y) {
    auto one_side = [](const std::vector<double>& from, const std::vector<double>& to) {
        double worst = 0;
        for (double v : from) {
            auto it = std::lower_bound(to.begin(), to.end(), v);
            double d = std::numeric_limits<double>::infinity();
            if (it != to.end()) d = *it - v;
            if (it != to.begin()) d = std::min(d, v - *std::prev(it));
            worst = std::max(worst, d);
        }
        return worst;
    };
    return std::max(one_side(x, y), one_side(y, x));
}

std::vector<std::vector<double>> sorted_rows(const FiniteMetricSpace& s) {
    std::vector<std::vector<double>> rows(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        rows[i] = s.row(i);
        std::sort(rows[i].begin(), rows[i].end());
    }
    return rows;
}

}  // namespace

double gh_lower_bounds(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
    if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::MalformedInput, "empty metric space");
    const auto ra = sorted_rows(a);
    const auto rb = sorted_rows(b);
    double bound = 0;

    double diam_a = 0, diam_b = 0;
    for (const auto& r : ra) diam_a = std::max(diam_a, r.back());
    for (const auto& r : rb) diam_b = std::max(diam_b, r.back());
    bound = std::max(bound, std::abs(diam_a - diam_b));

    auto value_set = [](const std::vector<std::vector<double>>& rows) {
        std::vector<double> all;
        for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return all;
    };
    bound = std::max(bound, hausdorff_sorted(value_set(ra), value_set(rb)));

    auto local = [](const std::vector<std::vector<double>>& from, const std::vector<std::vector<double>>& to) {
        double worst = 0;
        for (const auto& r : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& s : to) nearest = std::min(nearest, hausdorff_sorted(r, s));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    bound = std::max({bound, local(ra, rb), local(rb, ra)});
    return bound / 2;
}

FiniteMetricSpace parse_distance_matrix(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos > start) tokens.push_back(text.substr(start, pos - start));
    }
    if (tokens.empty()) throw Error(ErrorCode::MalformedInput, "empty distance matrix");
    auto number = [](std::string_view token) {
        double value = 0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || end != token.data() + token.size()) {
            throw Error(ErrorCode::MalformedInput, fmt::format("not a number: '{}'", token));
        }
        return value;
    };
    const double count = number(tokens[0]);
    if (count < 1 || count != std::floor(count) || count > 1e6) {
        throw Error(ErrorCode::MalformedInput, fmt::format("bad point count '{}'", tokens[0]));
    }
    const auto n = static_cast<std::size_t>(count);
    if (tokens.size() != 1 + n * (n - 1) / 2) {
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("expected {} distances, got {}", n * (n - 1) / 2, tokens.size() - 1));
    }
    std::vector<double> matrix(n * n, 0.0);
    std::size_t t = 1;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double d = number(tokens[t++]);
            matrix[i * n + j] = d;
            matrix[j * n + i] = d;
        }
    }
    return FiniteMetricSpace::from_matrix(std::move(matrix), n);
}

std::string to_distance_matrix_text(const FiniteMetricSpace& space) {
    std::string out = fmt::format("{}\n", space.size());
    for (std::size_t i = 1; i < space.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) out += fmt::format("{}{}", j ? " " : "", space.distance(i, j));
        out += '\n';
    }
    return out;
}

}  // namespace qmaps
