#include "gia/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gia/error.hpp"
#include "gia/rng.hpp"

namespace gia {

SplitMasks stratified_split(const std::vector<int>& labels, std::array<double, 3> ratios, std::uint64_t seed) {
    if (labels.empty()) throw ValidationError("stratified_split: no labels");
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("stratified_split: ratios sum to " + std::to_string(total) + ", expected 1");
    }

    std::map<int, std::vector<std::uint32_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<std::uint32_t>(i));
    }
    for (const auto& [cls, members] : by_class) {
        if (members.size() < 3) {
            throw ValidationError("stratified_split: class " + std::to_string(cls) + " has only " +
                                  std::to_string(members.size()) + " labeled nodes (need >= 3)");
        }
    }

    Rng rng = Rng(seed).stream("split");
    SplitMasks masks;
    for (auto& [cls, members] : by_class) {
        rng.shuffle(members);
        const std::size_t n = members.size();
        std::size_t n_train = static_cast<std::size_t>(std::floor(ratios[0] * static_cast<double>(n)));
        std::size_t n_val = static_cast<std::size_t>(std::floor(ratios[1] * static_cast<double>(n)));
        std::size_t n_test = static_cast<std::size_t>(std::floor(ratios[2] * static_cast<double>(n)));
        std::size_t rem = n - n_train - n_val - n_test;
        if (rem > 0) {
            ++n_train;
            --rem;
        }
        if (rem > 0) {
            ++n_val;
            --rem;
        }
        n_test += rem;

        std::size_t at = 0;
        for (std::size_t k = 0; k < n_train; ++k) masks.train.push_back(members[at++]);
        for (std::size_t k = 0; k < n_val; ++k) masks.val.push_back(members[at++]);
        for (std::size_t k = 0; k < n_test; ++k) masks.test.push_back(members[at++]);
    }
    std::sort(masks.train.begin(), masks.train.end());
    std::sort(masks.val.begin(), masks.val.end());
    std::sort(masks.test.begin(), masks.test.end());
    return masks;
}

namespace {

struct ColumnRange {
    double lo;
    double hi;
};

ColumnRange column_range(const Matrix& m, std::size_t col, const std::vector<std::uint32_t>& rows) {
    ColumnRange r{m(rows[0], col), m(rows[0], col)};
    for (std::uint32_t i : rows) {
        r.lo = std::min(r.lo, m(i, col));
        r.hi = std::max(r.hi, m(i, col));
    }
    return r;
}

void apply_range(Matrix& m, std::size_t col, const std::vector<std::uint32_t>& rows, ColumnRange r, bool clip) {
    const double span = r.hi - r.lo;
    for (std::uint32_t i : rows) {
        double v = span > 0.0 ? (m(i, col) - r.lo) / span : 0.0;
        if (clip) v = std::clamp(v, 0.0, 1.0);
        m(i, col) = v;
    }
}

}  // namespace

Graph minmax_normalize(const Graph& graph, const SplitMasks& masks, NormalizeMode mode) {
    if (graph.n_nodes == 0 || graph.node_features.cols() == 0) {
        throw ValidationError("minmax_normalize: empty node feature matrix");
    }
    Graph out = graph;

    std::vector<std::uint32_t> all_nodes(graph.n_nodes);
    for (std::size_t i = 0; i < graph.n_nodes; ++i) all_nodes[i] = static_cast<std::uint32_t>(i);

    for (std::size_t col = 0; col < out.node_features.cols(); ++col) {
        if (mode == NormalizeMode::kFitOnTrain) {
            if (masks.train.empty()) throw ValidationError("minmax_normalize: empty training mask");
            const ColumnRange r = column_range(out.node_features, col, masks.train);
            apply_range(out.node_features, col, all_nodes, r, /*clip=*/true);
        } else {
            for (const auto* split : {&masks.train, &masks.val, &masks.test}) {
                if (split->empty()) continue;
                const ColumnRange r = column_range(out.node_features, col, *split);
                apply_range(out.node_features, col, *split, r, /*clip=*/false);
            }
        }
    }

    if (out.edge_features.rows() > 0) {
        std::vector<std::uint32_t> all_edges(out.edge_features.rows());
        for (std::size_t i = 0; i < all_edges.size(); ++i) all_edges[i] = static_cast<std::uint32_t>(i);
        for (std::size_t col = 0; col < out.edge_features.cols(); ++col) {
            const ColumnRange r = column_range(out.edge_features, col, all_edges);
            apply_range(out.edge_features, col, all_edges, r, /*clip=*/false);
        }
    }
    return out;
}

}  // namespace gia
