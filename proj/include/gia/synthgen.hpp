#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gia/graph.hpp"

namespace gia {

// Random-geometric graph on the unit square with accident hot-spots, so that
// labels cluster geographically and positions carry signal that features
// alone do not.
struct SynthConfig {
    std::size_t n_nodes = 2000;
    double connect_radius = 0.03;  // fraction of the unit square
    std::size_t n_clusters = 8;    // hot-spot centers
    double label_noise = 0.1;      // flip probability, < 0.5
    std::size_t feature_dim = 8;
    double informativeness = 0.3;  // 0 = pure noise features, 1 = label fully readable
    std::uint64_t seed = 0;
    int n_classes = 2;                  // 2 = occurrence, 8 = severity (distance bands)
    double hotspot_radius = 0.0;        // 0 → derived from target_positive_rate
    double target_positive_rate = 0.15;

    void validate() const;
    double effective_hotspot_radius() const;
};

struct SynthResult {
    Graph graph;
    std::vector<std::array<double, 2>> centers;
    double hotspot_radius = 0.0;
};

SynthResult generate(const SynthConfig& config);

// Class signature vector the feature mix leaks; exported so tests can build
// a feature-only reference classifier.
double class_pattern(int cls, std::size_t feature, int n_classes);

// Writes centers, radius, and a config echo next to the CSVs. Training code
// never reads this file; it exists for oracle tests.
void save_metadata(const SynthResult& result, const SynthConfig& config, const std::filesystem::path& directory);

}  // namespace gia
