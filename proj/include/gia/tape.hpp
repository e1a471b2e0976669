#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gia/matrix.hpp"
#include "gia/sparse.hpp"

namespace gia {

// Records a forward computation as a topologically ordered list of nodes and
// replays it backwards for reverse-mode gradients. One training step owns one
// tape; tapes are single-writer and not shared across threads.
class Tape {
public:
    using NodeId = std::uint32_t;

    NodeId constant(Matrix value);
    NodeId param(Matrix value);

    NodeId matmul(NodeId a, NodeId b);
    NodeId matmul_at(NodeId a, NodeId b);  // aᵀ·b
    NodeId matmul_bt(NodeId a, NodeId b);  // a·bᵀ
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);  // elementwise
    NodeId add_row(NodeId a, NodeId row_bias);
    NodeId scale(NodeId a, double s);
    NodeId transpose(NodeId a);
    NodeId softmax_rows(NodeId a, double divisor);
    NodeId relu(NodeId a);
    // op must outlive the tape.
    NodeId spmm(const SparseOp& op, NodeId a);
    NodeId sum(NodeId a);  // 1×1

    // Mean over the masked rows of w[label]·(−log softmax(logits_row)[label]).
    // rows/labels are aligned; class_weights has one entry per class.
    NodeId weighted_cross_entropy(NodeId logits, std::span<const std::uint32_t> rows, std::span<const int> labels,
                                  std::span<const double> class_weights);

    const Matrix& value(NodeId id) const { return nodes_[id].value; }
    std::size_t size() const { return nodes_.size(); }

    // Gradients of the scalar loss node w.r.t. each node in `wrt` (typically
    // the registered params). Unreached params get zero matrices.
    std::vector<Matrix> gradients(NodeId loss, std::span<const NodeId> wrt) const;

private:
    enum class Op : std::uint8_t {
        kConstant,
        kParam,
        kMatMul,
        kMatMulAt,
        kMatMulBt,
        kAdd,
        kMul,
        kAddRow,
        kScale,
        kTranspose,
        kSoftmaxRows,
        kRelu,
        kSpmm,
        kSum,
        kWce,
    };

    struct WcePayload {
        std::vector<std::uint32_t> rows;
        std::vector<int> labels;
        std::vector<double> class_weights;
        Matrix probs;  // |rows|×C softmax rows cached for backward
    };

    struct Node {
        Op op;
        NodeId a = 0;
        NodeId b = 0;
        double scalar = 0.0;
        bool requires_grad = false;
        const SparseOp* sparse = nullptr;
        std::unique_ptr<WcePayload> wce;
        Matrix value;
    };

    NodeId push(Node n);
    bool needs_grad(NodeId id) const { return nodes_[id].requires_grad; }

    std::vector<Node> nodes_;
};

}  // namespace gia
