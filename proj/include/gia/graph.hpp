#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "gia/matrix.hpp"

namespace gia {

// Transductive node-classification instance: one monolithic graph with
// per-node features, 2-D positions, labels, and optional edge features.
struct Graph {
    std::size_t n_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // as listed in the file; undirected for aggregation
    Matrix node_features;                                        // N×D1
    Matrix edge_features;                                        // E×D2
    Matrix positions;                                            // N×2
    std::vector<int> labels;                                     // per node, in [0, n_classes)
    int n_classes = 2;                                           // 2 = occurrence, 8 = severity

    void validate() const;  // throws ValidationError on any broken invariant
};

// Disjoint train/val/test node-index sets.
struct SplitMasks {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> val;
    std::vector<std::uint32_t> test;
};

// Reads nodes.csv (node_id,pos_x,pos_y,f_*...,label) and edges.csv
// (src,dst,g_*...) from the directory. Node ids must form 0..N-1.
Graph load_graph(const std::filesystem::path& directory);

// Writes the same format with 17 significant digits; round-trips bit-exactly
// through load_graph.
void save_graph(const Graph& graph, const std::filesystem::path& directory);

}  // namespace gia
