#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gia/graph.hpp"

namespace gia {

// Per-class shuffled partition into train/val/test. Remainder nodes from
// flooring go train-first, then val, then test. Every class must have at
// least 3 labeled members. Deterministic for a fixed seed.
SplitMasks stratified_split(const std::vector<int>& labels, std::array<double, 3> ratios, std::uint64_t seed);

enum class NormalizeMode {
    kFitOnTrain,  // min/max from training nodes, applied everywhere, clipped to [0,1]
    kPerSplit,    // min/max computed and applied within each split independently
};

// Maps every node-feature column to [0,1]; constant columns map to 0.
// Edge features are scaled over all edges (edges carry no split).
Graph minmax_normalize(const Graph& graph, const SplitMasks& masks, NormalizeMode mode);

}  // namespace gia
