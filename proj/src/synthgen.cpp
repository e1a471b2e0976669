#include "gia/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include <json.hpp>

#include "gia/error.hpp"
#include "gia/rng.hpp"

namespace gia {

void SynthConfig::validate() const {
    if (n_nodes < 2) throw ConfigError("synthgen: need at least 2 nodes");
    if (!(connect_radius > 0.0 && connect_radius < 1.0)) {
        throw ConfigError("synthgen: connect_radius must be in (0, 1)");
    }
    if (!(label_noise >= 0.0 && label_noise < 0.5)) {
        throw ConfigError("synthgen: label_noise must be in [0, 0.5)");
    }
    if (!(informativeness >= 0.0 && informativeness <= 1.0)) {
        throw ConfigError("synthgen: informativeness must be in [0, 1]");
    }
    if (n_clusters < 1) throw ConfigError("synthgen: need at least 1 cluster");
    if (feature_dim < 1) throw ConfigError("synthgen: need at least 1 feature dimension");
    if (n_classes != 2 && n_classes != 8) throw ConfigError("synthgen: n_classes must be 2 or 8");
    if (hotspot_radius < 0.0) throw ConfigError("synthgen: hotspot_radius must be >= 0");
}

double SynthConfig::effective_hotspot_radius() const {
    if (hotspot_radius > 0.0) return hotspot_radius;
    // Disc area × cluster count ≈ target rate, ignoring overlap.
    return std::sqrt(target_positive_rate / (std::numbers::pi * static_cast<double>(n_clusters)));
}

double class_pattern(int cls, std::size_t feature, int n_classes) {
    // Distinct per class in every coordinate (strictly monotone in cls for
    // feature 0), bounded in [-1, 1].
    return std::cos(std::numbers::pi * (static_cast<double>(cls) + 0.5) * static_cast<double>(feature + 1) /
                    static_cast<double>(n_classes));
}

namespace {

// Edges between all pairs within the radius, found through a uniform grid.
// Cell size never drops below the radius, and the grid never outgrows ~n
// cells no matter how small the radius is.
std::vector<std::pair<std::uint32_t, std::uint32_t>> radius_edges(const Matrix& pos, double radius) {
    const std::size_t n = pos.rows();
    const auto by_radius = static_cast<std::size_t>(std::floor(1.0 / radius));
    const auto by_count = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))) + 1;
    const std::size_t cells = std::max<std::size_t>(1, std::min(by_radius, by_count));
    const double cell_size = 1.0 / static_cast<double>(cells);

    std::vector<std::vector<std::uint32_t>> grid(cells * cells);
    auto cell_of = [&](double x) {
        auto c = static_cast<std::size_t>(x / cell_size);
        return std::min(c, cells - 1);
    };
    for (std::size_t i = 0; i < n; ++i) {
        grid[cell_of(pos(i, 0)) * cells + cell_of(pos(i, 1))].push_back(static_cast<std::uint32_t>(i));
    }

    const double r2 = radius * radius;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t cx = cell_of(pos(i, 0)), cy = cell_of(pos(i, 1));
        const std::size_t x0 = cx > 0 ? cx - 1 : 0, x1 = std::min(cx + 1, cells - 1);
        const std::size_t y0 = cy > 0 ? cy - 1 : 0, y1 = std::min(cy + 1, cells - 1);
        for (std::size_t gx = x0; gx <= x1; ++gx) {
            for (std::size_t gy = y0; gy <= y1; ++gy) {
                for (std::uint32_t j : grid[gx * cells + gy]) {
                    if (j <= i) continue;
                    const double dx = pos(i, 0) - pos(j, 0);
                    const double dy = pos(i, 1) - pos(j, 1);
                    if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
    config.validate();
    Rng root(config.seed);
    const std::size_t n = config.n_nodes;

    Rng pos_rng = root.stream("positions");
    Matrix positions(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        positions(i, 0) = pos_rng.uniform01();
        positions(i, 1) = pos_rng.uniform01();
    }

    Rng center_rng = root.stream("centers");
    std::vector<std::array<double, 2>> centers(config.n_clusters);
    for (auto& c : centers) c = {center_rng.uniform01(), center_rng.uniform01()};

    const double hotspot = config.effective_hotspot_radius();
    std::vector<double> nearest_dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) {
            const double dx = positions(i, 0) - c[0];
            const double dy = positions(i, 1) - c[1];
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
        nearest_dist[i] = best;
    }

    std::vector<int> labels(n, 0);
    if (config.n_classes == 2) {
        for (std::size_t i = 0; i < n; ++i) labels[i] = nearest_dist[i] <= hotspot ? 1 : 0;
    } else {
        // Distance bands with edges at equal quantiles of the observed
        // nearest-center distances; band 0 is closest to a hot-spot.
        std::vector<double> sorted = nearest_dist;
        std::sort(sorted.begin(), sorted.end());
        std::array<double, 7> cuts{};
        for (std::size_t k = 1; k < 8; ++k) {
            cuts[k - 1] = sorted[std::min(n - 1, k * n / 8)];
        }
        for (std::size_t i = 0; i < n; ++i) {
            int band = 0;
            while (band < 7 && nearest_dist[i] > cuts[band]) ++band;
            labels[i] = band;
        }
    }

    Rng noise_rng = root.stream("label-noise");
    for (std::size_t i = 0; i < n; ++i) {
        if (noise_rng.uniform01() < config.label_noise) {
            if (config.n_classes == 2) {
                labels[i] = 1 - labels[i];
            } else {
                const int shift = static_cast<int>(noise_rng.uniform_int(1, config.n_classes - 1));
                labels[i] = (labels[i] + shift) % config.n_classes;
            }
        }
    }

    Rng feat_rng = root.stream("features");
    Matrix features(n, config.feature_dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < config.feature_dim; ++f) {
            const double signal = class_pattern(labels[i], f, config.n_classes);
            features(i, f) = config.informativeness * signal + (1.0 - config.informativeness) * feat_rng.normal();
        }
    }

    auto edges = radius_edges(positions, config.connect_radius);
    if (edges.empty()) {
        throw GenerationError("synthgen: connect_radius " + std::to_string(config.connect_radius) +
                              " produced a graph with zero edges");
    }
    Matrix edge_features(edges.size(), 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        const double dx = positions(a, 0) - positions(b, 0);
        const double dy = positions(a, 1) - positions(b, 1);
        edge_features(e, 0) = std::sqrt(dx * dx + dy * dy);
    }

    SynthResult result;
    result.graph.n_nodes = n;
    result.graph.edges = std::move(edges);
    result.graph.node_features = std::move(features);
    result.graph.edge_features = std::move(edge_features);
    result.graph.positions = std::move(positions);
    result.graph.labels = std::move(labels);
    result.graph.n_classes = config.n_classes;
    result.centers = std::move(centers);
    result.hotspot_radius = hotspot;
    result.graph.validate();
    return result;
}

void save_metadata(const SynthResult& result, const SynthConfig& config, const std::filesystem::path& directory) {
    nlohmann::json j;
    j["centers"] = nlohmann::json::array();
    for (const auto& c : result.centers) j["centers"].push_back({c[0], c[1]});
    j["hotspot_radius"] = result.hotspot_radius;
    j["config"] = {
        {"n_nodes", config.n_nodes},
        {"connect_radius", config.connect_radius},
        {"n_clusters", config.n_clusters},
        {"label_noise", config.label_noise},
        {"feature_dim", config.feature_dim},
        {"informativeness", config.informativeness},
        {"seed", config.seed},
        {"n_classes", config.n_classes},
        {"target_positive_rate", config.target_positive_rate},
    };
    const auto path = directory / "metadata.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out.good()) throw IoError("write failed: " + path.string());
}

}  // namespace gia
