#pragma once

#include <string_view>
#include <vector>

#include "gia/attention.hpp"
#include "gia/graph.hpp"
#include "gia/sparse.hpp"
#include "gia/tape.hpp"

namespace gia {

enum class Host { kGcn, kMeanAgg };

Host host_from_string(std::string_view s);
std::string_view to_string(Host host);

// Â = D̂^{-1/2}(A+I)D̂^{-1/2}; edges are treated as undirected (each listed
// edge contributes both directions) and degrees count the inserted self-loop.
SparseOp normalize_adjacency(const Graph& graph);

// Row-mean aggregation over neighbors plus self, D̂^{-1}(A+I).
SparseOp mean_adjacency(const Graph& graph);

enum class Activation { kRelu, kNone };

// act(op·H·W + bias) via edge-list gather-scatter.
Matrix gcn_layer(const SparseOp& op, const Matrix& h, const Matrix& w, const Matrix& bias, Activation act);

struct ModelConfig {
    Host host = Host::kGcn;
    std::size_t d_latent = 16;
    std::size_t n_conv_layers = 2;
    std::size_t n_classes = 2;
    PeMode pe_mode = PeMode::kGia;
    bool use_qkv = true;
    ResidualSource residual_source = ResidualSource::kFeatures;
};

struct ModelParams {
    struct Layer {
        Matrix w;
        Matrix bias;  // 1×D_out
    };

    GiaParams gia;
    std::vector<Layer> conv;  // Dn→Dn each
    Layer head;               // Dn→n_classes

    static ModelParams init(std::size_t d_in, const ModelConfig& config, Rng rng);

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;
};

// gia block → conv stack (relu) → linear head; returns N×n_classes logits.
Matrix model_forward(const Graph& graph, const SparseOp& op, const ModelParams& params, const ModelConfig& config);

struct ModelParamNodes {
    GiaParamNodes gia;
    std::vector<std::pair<Tape::NodeId, Tape::NodeId>> conv;  // (w, bias)
    std::pair<Tape::NodeId, Tape::NodeId> head;
    std::vector<Tape::NodeId> all;  // same order as ModelParams::parameters()
};

ModelParamNodes register_model_params(Tape& tape, const ModelParams& params);

Tape::NodeId model_forward(Tape& tape, const Graph& graph, const SparseOp& op, const ModelParamNodes& ids,
                           const ModelConfig& config);

}  // namespace gia
