#include "qmaps/trees.h"

#include <algorithm>
#include <sstream>

#include <fmt/core.h>

#include "qmaps/error.h"

namespace qmaps {

PlaneTree PlaneTree::from_dyck(std::vector<bool> up) {
    if (up.size() % 2 != 0)
        throw Error(ErrorCode::MalformedInput, fmt::format("Dyck word of odd length {}", up.size()));
    PlaneTree t;
    const std::size_t nodes = up.size() / 2 + 1;
    t.parent_.reserve(nodes);
    t.depth_.reserve(nodes);
    t.parent_.push_back(kNoParent);
    t.depth_.push_back(0);
    std::vector<std::uint32_t> child_count(nodes, 0);
    NodeId current = 0;
    for (std::size_t i = 0; i < up.size(); ++i) {
        if (up[i]) {
            if (t.parent_.size() >= nodes)
                throw Error(ErrorCode::MalformedInput, fmt::format("too many up-steps at {}", i));
            auto child = static_cast<NodeId>(t.parent_.size());
            t.parent_.push_back(current);
            t.depth_.push_back(t.depth_[current] + 1);
            ++child_count[current];
            current = child;
        } else {
            if (current == 0)
                throw Error(ErrorCode::MalformedInput, fmt::format("Dyck word dips below 0 at {}", i));
            current = t.parent_[current];
        }
    }
    if (current != 0 || t.parent_.size() != nodes)
        throw Error(ErrorCode::MalformedInput, "Dyck word does not return to 0");

    t.child_offsets_.assign(nodes + 1, 0);
    for (std::size_t v = 0; v < nodes; ++v) t.child_offsets_[v + 1] = t.child_offsets_[v] + child_count[v];
    t.children_.assign(nodes - 1, 0);
    std::vector<std::size_t> fill(t.child_offsets_.begin(), t.child_offsets_.end() - 1);
    // Preorder numbering means children are discovered left to right.
    for (NodeId v = 1; v < nodes; ++v) t.children_[fill[t.parent_[v]]++] = v;

    t.subtree_size_.assign(nodes, 1);
    for (NodeId v = static_cast<NodeId>(nodes) - 1; v >= 1; --v) t.subtree_size_[t.parent_[v]] += t.subtree_size_[v];
    t.dyck_ = std::move(up);
    return t;
}

PlaneTree PlaneTree::from_parens(std::string_view word) {
    std::vector<bool> up;
    up.reserve(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] == '(') up.push_back(true);
        else if (word[i] == ')') up.push_back(false);
        else throw Error(ErrorCode::MalformedInput, fmt::format("unexpected character at {}", i));
    }
    return from_dyck(std::move(up));
}

std::string PlaneTree::to_parens() const {
    std::string s;
    s.reserve(dyck_.size());
    for (bool u : dyck_) s.push_back(u ? '(' : ')');
    return s;
}

bool PlaneTree::is_ancestor(NodeId a, NodeId b) const {
    return a <= b && b < a + subtree_size_[a];
}

int WellLabeledTree::min_label() const {
    return *std::min_element(labels.begin(), labels.end());
}

void WellLabeledTree::validate(bool require_root_label_one) const {
    if (labels.size() != tree.node_count())
        throw Error(ErrorCode::InvariantViolation,
                    fmt::format("{} labels for {} nodes", labels.size(), tree.node_count()));
    for (NodeId v = 0; v < labels.size(); ++v) {
        if (labels[v] < 1)
            throw Error(ErrorCode::InvariantViolation, fmt::format("label of node {} is {}", v, labels[v]));
        if (v > 0 && std::abs(labels[v] - labels[tree.parent(v)]) > 1)
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("labels jump by more than 1 on edge to node {}", v));
    }
    if (require_root_label_one && labels[0] != 1)
        throw Error(ErrorCode::InvariantViolation, fmt::format("root label is {}", labels[0]));
}

std::string_view to_string(SamplingMode mode) {
    return mode == SamplingMode::ExactRejection ? "exact-rejection" : "free-shift";
}

SamplingMode parse_sampling_mode(std::string_view text) {
    if (text == "exact-rejection" || text == "exact") return SamplingMode::ExactRejection;
    if (text == "free-shift" || text == "free") return SamplingMode::FreeShift;
    throw Error(ErrorCode::MalformedInput, fmt::format("unknown sampling mode '{}'", text));
}

std::uint64_t catalan(unsigned n) {
    unsigned __int128 c = 1;
    for (unsigned k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return static_cast<std::uint64_t>(c);
}

std::uint64_t well_labeled_count(unsigned n) {
    unsigned __int128 count = 2 * static_cast<unsigned __int128>(catalan(n));
    for (unsigned k = 0; k < n; ++k) count *= 3;
    return static_cast<std::uint64_t>(count / (n + 2));
}

PlaneTree sample_plane_tree(std::size_t n, std::mt19937_64& rng) {
    if (n == 0) throw Error(ErrorCode::EmptyTree, "plane tree needs at least one edge");
    // n up-steps and n+1 down-steps; the unique cyclic shift starting right
    // after the first minimum of the walk is a Dyck word followed by a final
    // down-step.
    std::vector<bool> steps(2 * n + 1, false);
    std::fill(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(n), true);
    std::shuffle(steps.begin(), steps.end(), rng);

    long height = 0, lowest = 1;
    std::size_t argmin = 0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        height += steps[t] ? 1 : -1;
        if (height < lowest) {
            lowest = height;
            argmin = t;
        }
    }
    std::vector<bool> dyck(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) dyck[i] = steps[(argmin + 1 + i) % steps.size()];
    return PlaneTree::from_dyck(std::move(dyck));
}

PlaneTree sample_plane_tree(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_plane_tree(n, rng);
}

WellLabeledTree sample_well_labeled(std::size_t n, std::uint64_t seed, SamplingMode mode) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> increment(-1, 1);

    if (mode == SamplingMode::ExactRejection) {
        // Proposal: uniform Dyck word and i.i.d. increments. The word is
        // drawn step by step (from height h with r steps left, the next step
        // goes up with probability k(h+2) / (r(h+1)), k = (r-h)/2), so an
        // attempt is abandoned at the first label below 1.
        if (n == 0) throw Error(ErrorCode::EmptyTree, "plane tree needs at least one edge");
        std::vector<bool> word(2 * n);
        std::vector<int> stack, labels;
        for (;;) {
            stack.assign(1, 1);
            labels.assign(1, 1);
            std::uint64_t h = 0;
            bool ok = true;
            for (std::size_t t = 0; t < 2 * n && ok; ++t) {
                const std::uint64_t r = 2 * n - t;
                const std::uint64_t k = (r - h) / 2;
                std::uniform_int_distribution<std::uint64_t> coin(0, r * (h + 1) - 1);
                word[t] = coin(rng) < k * (h + 2);
                if (word[t]) {
                    const int label = stack.back() + increment(rng);
                    ok = label >= 1;
                    stack.push_back(label);
                    labels.push_back(label);
                    ++h;
                } else {
                    stack.pop_back();
                    --h;
                }
            }
            if (ok) return WellLabeledTree{PlaneTree::from_dyck(word), std::move(labels)};
        }
    }

    PlaneTree tree = sample_plane_tree(n, rng);
    std::vector<int> labels(tree.node_count());
    labels[0] = 0;
    for (NodeId v = 1; v < tree.node_count(); ++v) labels[v] = labels[tree.parent(v)] + increment(rng);
    const int shift = 1 - *std::min_element(labels.begin(), labels.end());
    for (int& l : labels) l += shift;
    WellLabeledTree shifted{std::move(tree), std::move(labels)};
    if (shifted.labels[0] == 1) return shifted;

    const auto nodes = contour_nodes(shifted.tree);
    std::size_t corner = 0;
    while (shifted.labels[nodes[corner]] != 1) ++corner;
    return reroot(shifted, corner);
}

namespace {

void dyck_words(unsigned n, std::vector<bool>& prefix, int height, unsigned ups,
                const std::function<void(const PlaneTree&)>& visit) {
    if (prefix.size() == 2 * n) {
        visit(PlaneTree::from_dyck(prefix));
        return;
    }
    if (ups < n) {
        prefix.push_back(true);
        dyck_words(n, prefix, height + 1, ups + 1, visit);
        prefix.pop_back();
    }
    if (height > 0) {
        prefix.push_back(false);
        dyck_words(n, prefix, height - 1, ups, visit);
        prefix.pop_back();
    }
}

void label_nodes(WellLabeledTree& t, NodeId v, const std::function<void(const WellLabeledTree&)>& visit) {
    if (v == t.tree.node_count()) {
        visit(t);
        return;
    }
    const int base = t.labels[t.tree.parent(v)];
    for (int delta = -1; delta <= 1; ++delta) {
        if (base + delta < 1) continue;
        t.labels[v] = base + delta;
        label_nodes(t, v + 1, visit);
    }
}

}  // namespace

void enumerate_plane_trees(unsigned n, const std::function<void(const PlaneTree&)>& visit) {
    std::vector<bool> prefix;
    prefix.reserve(2 * n);
    dyck_words(n, prefix, 0, 0, visit);
}

void enumerate_well_labeled(unsigned n, const std::function<void(const WellLabeledTree&)>& visit) {
    if (n > kMaxEnumerationSize)
        throw Error(ErrorCode::SizeTooLarge,
                    fmt::format("enumeration limited to n <= {} (got {})", kMaxEnumerationSize, n));
    enumerate_plane_trees(n, [&](const PlaneTree& tree) {
        WellLabeledTree t{tree, std::vector<int>(tree.node_count(), 1)};
        label_nodes(t, 1, visit);
    });
}

std::vector<WellLabeledTree> all_well_labeled(unsigned n) {
    std::vector<WellLabeledTree> out;
    enumerate_well_labeled(n, [&](const WellLabeledTree& t) { out.push_back(t); });
    return out;
}

std::vector<NodeId> contour_nodes(const PlaneTree& tree) {
    std::vector<NodeId> x;
    x.reserve(tree.dyck().size() + 1);
    x.push_back(0);
    NodeId current = 0, next_new = 1;
    for (bool up : tree.dyck()) {
        current = up ? next_new++ : tree.parent(current);
        x.push_back(current);
    }
    return x;
}

ContourPair contour_processes(const WellLabeledTree& t) {
    ContourPair p;
    p.n = t.size();
    const auto x = contour_nodes(t.tree);
    p.C.reserve(x.size());
    p.L.reserve(x.size());
    for (NodeId v : x) {
        p.C.push_back(static_cast<int>(t.tree.depth(v)));
        p.L.push_back(t.labels[v]);
    }
    return p;
}

WellLabeledTree from_contour(const ContourPair& pair) {
    const std::size_t len = 2 * pair.n + 1;
    if (pair.C.size() != len || pair.L.size() != len)
        throw Error(ErrorCode::MalformedInput, fmt::format("contour arrays must have length {}", len));
    if (pair.C.front() != 0 || pair.C.back() != 0)
        throw Error(ErrorCode::MalformedInput, "contour must start and end at 0");
    std::vector<bool> up(2 * pair.n);
    for (std::size_t i = 0; i + 1 < len; ++i) {
        const int step = pair.C[i + 1] - pair.C[i];
        if (step != 1 && step != -1)
            throw Error(ErrorCode::MalformedInput, fmt::format("contour step {} at {}", step, i));
        up[i] = step == 1;
    }
    WellLabeledTree t{PlaneTree::from_dyck(std::move(up)), {}};
    const auto x = contour_nodes(t.tree);
    t.labels.assign(t.tree.node_count(), 0);
    std::vector<bool> seen(t.tree.node_count(), false);
    for (std::size_t i = 0; i < len; ++i) {
        if (!seen[x[i]]) {
            seen[x[i]] = true;
            t.labels[x[i]] = pair.L[i];
        } else if (t.labels[x[i]] != pair.L[i]) {
            throw Error(ErrorCode::MalformedInput,
                        fmt::format("label process disagrees with itself at time {}", i));
        }
    }
    return t;
}

WellLabeledTree reroot(const WellLabeledTree& t, std::size_t corner) {
    const std::size_t corners = 2 * t.size();
    if (corner >= corners)
        throw Error(ErrorCode::IndexOutOfRange, fmt::format("corner {} >= {}", corner, corners));
    const auto x = contour_nodes(t.tree);
    ContourPair p;
    p.n = t.size();
    p.C.resize(corners + 1);
    p.L.resize(corners + 1);
    std::vector<bool> seen(t.tree.node_count(), false);
    // The rotated corner walk is the contour of the re-rooted tree; an edge is
    // climbed exactly when its far end is reached for the first time.
    seen[x[corner]] = true;
    p.C[0] = 0;
    p.L[0] = t.labels[x[corner]];
    for (std::size_t i = 1; i <= corners; ++i) {
        const NodeId v = x[(corner + i) % corners];
        p.C[i] = p.C[i - 1] + (seen[v] ? -1 : 1);
        seen[v] = true;
        p.L[i] = t.labels[v];
    }
    return from_contour(p);
}

std::string to_text(const WellLabeledTree& t) {
    std::string out = t.tree.to_parens();
    out.push_back('\n');
    for (std::size_t v = 0; v < t.labels.size(); ++v) {
        if (v) out.push_back(' ');
        out += std::to_string(t.labels[v]);
    }
    out.push_back('\n');
    return out;
}

WellLabeledTree parse_tree_text(std::string_view text, bool require_root_label_one) {
    std::istringstream in{std::string(text)};
    std::string word;
    if (!(in >> word)) throw Error(ErrorCode::MalformedInput, "missing Dyck word");
    WellLabeledTree t{PlaneTree::from_parens(word), {}};
    long value;
    while (in >> value) t.labels.push_back(static_cast<int>(value));
    if (!in.eof())
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("non-numeric label after {} labels", t.labels.size()));
    if (t.labels.size() != t.tree.node_count())
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("expected {} labels, found {}", t.tree.node_count(), t.labels.size()));
    try {
        t.validate(require_root_label_one);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedInput, e.what());
    }
    return t;
}

std::string contour_csv(const ContourPair& pair) {
    std::string out = "i,C,L\n";
    for (std::size_t i = 0; i < pair.C.size(); ++i) out += fmt::format("{},{},{}\n", i, pair.C[i], pair.L[i]);
    return out;
}

}  // namespace qmaps
