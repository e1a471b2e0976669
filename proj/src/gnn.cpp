#include "gia/gnn.hpp"

#include <cmath>
#include <string>

#include "gia/error.hpp"

namespace gia {

Host host_from_string(std::string_view s) {
    if (s == "gcn") return Host::kGcn;
    if (s == "mean-agg") return Host::kMeanAgg;
    throw ConfigError("unknown host '" + std::string(s) + "' (expected gcn|mean-agg)");
}

std::string_view to_string(Host host) {
    return host == Host::kGcn ? "gcn" : "mean-agg";
}

namespace {

std::vector<std::size_t> degrees_with_self_loops(const Graph& graph) {
    std::vector<std::size_t> deg(graph.n_nodes, 1);  // self-loop
    for (const auto& [src, dst] : graph.edges) {
        ++deg[src];
        ++deg[dst];
    }
    return deg;
}

}  // namespace

SparseOp normalize_adjacency(const Graph& graph) {
    const auto deg = degrees_with_self_loops(graph);
    SparseOp op;
    op.n = graph.n_nodes;
    op.entries.reserve(2 * graph.edges.size() + graph.n_nodes);
    for (std::size_t i = 0; i < graph.n_nodes; ++i) {
        op.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                              1.0 / static_cast<double>(deg[i])});
    }
    for (const auto& [src, dst] : graph.edges) {
        const double w = 1.0 / std::sqrt(static_cast<double>(deg[src]) * static_cast<double>(deg[dst]));
        op.entries.push_back({src, dst, w});
        op.entries.push_back({dst, src, w});
    }
    return op;
}

SparseOp mean_adjacency(const Graph& graph) {
    const auto deg = degrees_with_self_loops(graph);
    SparseOp op;
    op.n = graph.n_nodes;
    op.entries.reserve(2 * graph.edges.size() + graph.n_nodes);
    for (std::size_t i = 0; i < graph.n_nodes; ++i) {
        op.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                              1.0 / static_cast<double>(deg[i])});
    }
    for (const auto& [src, dst] : graph.edges) {
        op.entries.push_back({src, dst, 1.0 / static_cast<double>(deg[src])});
        op.entries.push_back({dst, src, 1.0 / static_cast<double>(deg[dst])});
    }
    return op;
}

Matrix gcn_layer(const SparseOp& op, const Matrix& h, const Matrix& w, const Matrix& bias, Activation act) {
    Matrix hw = ops::matmul(h, w);
    Matrix agg = spmm(op, hw);
    Matrix out = ops::add_row_broadcast(agg, bias);
    return act == Activation::kRelu ? ops::relu(out) : out;
}

ModelParams ModelParams::init(std::size_t d_in, const ModelConfig& config, Rng rng) {
    ModelParams p;
    p.gia = GiaParams::init(d_in, config.d_latent, rng.stream("gia"));
    p.gia.pe_mode = config.pe_mode;
    p.gia.use_qkv = config.use_qkv;
    p.gia.residual_source = config.residual_source;

    Rng conv_rng = rng.stream("conv");
    for (std::size_t l = 0; l < config.n_conv_layers; ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(config.d_latent + config.d_latent));
        Layer layer;
        layer.w = Matrix(config.d_latent, config.d_latent);
        for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w.data()[i] = conv_rng.uniform(-limit, limit);
        layer.bias = Matrix(1, config.d_latent);
        p.conv.push_back(std::move(layer));
    }

    Rng head_rng = rng.stream("head");
    const double limit = std::sqrt(6.0 / static_cast<double>(config.d_latent + config.n_classes));
    p.head.w = Matrix(config.d_latent, config.n_classes);
    for (std::size_t i = 0; i < p.head.w.size(); ++i) p.head.w.data()[i] = head_rng.uniform(-limit, limit);
    p.head.bias = Matrix(1, config.n_classes);
    return p;
}

std::vector<Matrix*> ModelParams::parameters() {
    std::vector<Matrix*> out{&gia.w_embed, &gia.w_pos, &gia.b_pos, &gia.w_q, &gia.w_k,
                             &gia.w_v,     &gia.w_res, &gia.b_res};
    for (auto& layer : conv) {
        out.push_back(&layer.w);
        out.push_back(&layer.bias);
    }
    out.push_back(&head.w);
    out.push_back(&head.bias);
    return out;
}

std::vector<const Matrix*> ModelParams::parameters() const {
    auto mutable_this = const_cast<ModelParams*>(this);
    std::vector<const Matrix*> out;
    for (Matrix* m : mutable_this->parameters()) out.push_back(m);
    return out;
}

Matrix model_forward(const Graph& graph, const SparseOp& op, const ModelParams& params,
                     const ModelConfig& config) {
    Matrix h = gia_forward(graph.node_features, graph.positions, params.gia);
    for (const auto& layer : params.conv) {
        h = gcn_layer(op, h, layer.w, layer.bias, Activation::kRelu);
    }
    Matrix logits = ops::add_row_broadcast(ops::matmul(h, params.head.w), params.head.bias);
    if (logits.cols() != config.n_classes) {
        throw ShapeError("model_forward: head produces " + std::to_string(logits.cols()) + " classes, config has " +
                         std::to_string(config.n_classes));
    }
    return logits;
}

ModelParamNodes register_model_params(Tape& tape, const ModelParams& params) {
    ModelParamNodes ids;
    ids.gia = register_gia_params(tape, params.gia);
    ids.all = {ids.gia.w_embed, ids.gia.w_pos, ids.gia.b_pos, ids.gia.w_q,
               ids.gia.w_k,     ids.gia.w_v,   ids.gia.w_res, ids.gia.b_res};
    for (const auto& layer : params.conv) {
        Tape::NodeId w = tape.param(layer.w);
        Tape::NodeId b = tape.param(layer.bias);
        ids.conv.emplace_back(w, b);
        ids.all.push_back(w);
        ids.all.push_back(b);
    }
    ids.head.first = tape.param(params.head.w);
    ids.head.second = tape.param(params.head.bias);
    ids.all.push_back(ids.head.first);
    ids.all.push_back(ids.head.second);
    return ids;
}

Tape::NodeId model_forward(Tape& tape, const Graph& graph, const SparseOp& op, const ModelParamNodes& ids,
                           const ModelConfig& config) {
    GiaParams cfg;  // only the mode switches matter on the taped path
    cfg.pe_mode = config.pe_mode;
    cfg.use_qkv = config.use_qkv;
    cfg.residual_source = config.residual_source;

    Tape::NodeId h = gia_forward(tape, graph.node_features, graph.positions, ids.gia, cfg);
    for (const auto& [w, b] : ids.conv) {
        h = tape.relu(tape.add_row(tape.spmm(op, tape.matmul(h, w)), b));
    }
    return tape.add_row(tape.matmul(h, ids.head.first), ids.head.second);
}

}  // namespace gia
