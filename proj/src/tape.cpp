#include "gia/tape.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gia/error.hpp"

namespace gia {

namespace {

void accumulate(Matrix& slot, Matrix delta) {
    if (slot.empty()) {
        slot = std::move(delta);
        return;
    }
    for (std::size_t i = 0; i < slot.size(); ++i) slot.data()[i] += delta.data()[i];
}

}  // namespace

Tape::NodeId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::constant(Matrix value) {
    Node n{Op::kConstant};
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::NodeId Tape::param(Matrix value) {
    Node n{Op::kParam};
    n.requires_grad = true;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
    Node n{Op::kMatMul, a, b};
    n.requires_grad = needs_grad(a) || needs_grad(b);
    n.value = ops::matmul(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::matmul_at(NodeId a, NodeId b) {
    Node n{Op::kMatMulAt, a, b};
    n.requires_grad = needs_grad(a) || needs_grad(b);
    n.value = ops::matmul_at(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::matmul_bt(NodeId a, NodeId b) {
    Node n{Op::kMatMulBt, a, b};
    n.requires_grad = needs_grad(a) || needs_grad(b);
    n.value = ops::matmul_bt(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    Node n{Op::kAdd, a, b};
    n.requires_grad = needs_grad(a) || needs_grad(b);
    n.value = ops::add(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
    Node n{Op::kMul, a, b};
    n.requires_grad = needs_grad(a) || needs_grad(b);
    n.value = ops::mul(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::add_row(NodeId a, NodeId row_bias) {
    Node n{Op::kAddRow, a, row_bias};
    n.requires_grad = needs_grad(a) || needs_grad(row_bias);
    n.value = ops::add_row_broadcast(nodes_[a].value, nodes_[row_bias].value);
    return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double s) {
    Node n{Op::kScale, a};
    n.scalar = s;
    n.requires_grad = needs_grad(a);
    n.value = ops::scale(nodes_[a].value, s);
    return push(std::move(n));
}

Tape::NodeId Tape::transpose(NodeId a) {
    Node n{Op::kTranspose, a};
    n.requires_grad = needs_grad(a);
    n.value = ops::transpose(nodes_[a].value);
    return push(std::move(n));
}

Tape::NodeId Tape::softmax_rows(NodeId a, double divisor) {
    Node n{Op::kSoftmaxRows, a};
    n.scalar = divisor;
    n.requires_grad = needs_grad(a);
    n.value = ops::softmax_rows(nodes_[a].value, divisor);
    return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId a) {
    Node n{Op::kRelu, a};
    n.requires_grad = needs_grad(a);
    n.value = ops::relu(nodes_[a].value);
    return push(std::move(n));
}

Tape::NodeId Tape::spmm(const SparseOp& op, NodeId a) {
    Node n{Op::kSpmm, a};
    n.sparse = &op;
    n.requires_grad = needs_grad(a);
    n.value = gia::spmm(op, nodes_[a].value);
    return push(std::move(n));
}

Tape::NodeId Tape::sum(NodeId a) {
    Node n{Op::kSum, a};
    n.requires_grad = needs_grad(a);
    n.value = Matrix(1, 1, {ops::sum_all(nodes_[a].value)});
    return push(std::move(n));
}

Tape::NodeId Tape::weighted_cross_entropy(NodeId logits, std::span<const std::uint32_t> rows,
                                          std::span<const int> labels, std::span<const double> class_weights) {
    const Matrix& lg = nodes_[logits].value;
    const std::size_t c = lg.cols();
    if (rows.size() != labels.size()) {
        throw ArgumentError("weighted_cross_entropy: rows/labels length mismatch");
    }
    if (rows.empty()) {
        throw ValidationError("weighted_cross_entropy: empty node set");
    }
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m] >= lg.rows()) {
            throw ValidationError("weighted_cross_entropy: node index " + std::to_string(rows[m]) + " out of range");
        }
        if (labels[m] < 0 || static_cast<std::size_t>(labels[m]) >= c) {
            throw ValidationError("weighted_cross_entropy: label " + std::to_string(labels[m]) +
                                  " outside [0, " + std::to_string(c) + ")");
        }
    }
    if (class_weights.size() != c) {
        throw ArgumentError("weighted_cross_entropy: expected " + std::to_string(c) + " class weights");
    }

    Node n{Op::kWce, logits};
    n.requires_grad = needs_grad(logits);
    n.wce = std::make_unique<WcePayload>();
    n.wce->rows.assign(rows.begin(), rows.end());
    n.wce->labels.assign(labels.begin(), labels.end());
    n.wce->class_weights.assign(class_weights.begin(), class_weights.end());
    n.wce->probs = Matrix(rows.size(), c);

    double loss = 0.0;
    for (std::size_t m = 0; m < rows.size(); ++m) {
        const double* row = lg.data() + static_cast<std::size_t>(rows[m]) * c;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c; ++j) mx = std::max(mx, row[j]);
        double total = 0.0;
        double* p = n.wce->probs.data() + m * c;
        for (std::size_t j = 0; j < c; ++j) {
            p[j] = std::exp(row[j] - mx);
            total += p[j];
        }
        for (std::size_t j = 0; j < c; ++j) p[j] /= total;
        loss -= class_weights[labels[m]] * std::log(p[labels[m]]);
    }
    n.value = Matrix(1, 1, {loss / static_cast<double>(rows.size())});
    return push(std::move(n));
}

std::vector<Matrix> Tape::gradients(NodeId loss, std::span<const NodeId> wrt) const {
    const Matrix& lv = nodes_[loss].value;
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw ShapeError("gradients: loss node is " + std::to_string(lv.rows()) + "x" + std::to_string(lv.cols()) +
                         ", expected 1x1");
    }

    std::vector<Matrix> grads(nodes_.size());
    grads[loss] = Matrix(1, 1, {1.0});

    for (NodeId id = loss + 1; id-- > 0;) {
        const Node& n = nodes_[id];
        if (!n.requires_grad || grads[id].empty()) continue;
        const Matrix& g = grads[id];
        switch (n.op) {
            case Op::kConstant:
            case Op::kParam:
                break;
            case Op::kMatMul:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::matmul_bt(g, nodes_[n.b].value));
                if (needs_grad(n.b)) accumulate(grads[n.b], ops::matmul_at(nodes_[n.a].value, g));
                break;
            case Op::kMatMulAt:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::matmul_bt(nodes_[n.b].value, g));
                if (needs_grad(n.b)) accumulate(grads[n.b], ops::matmul(nodes_[n.a].value, g));
                break;
            case Op::kMatMulBt:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::matmul(g, nodes_[n.b].value));
                if (needs_grad(n.b)) accumulate(grads[n.b], ops::matmul_at(g, nodes_[n.a].value));
                break;
            case Op::kAdd:
                if (needs_grad(n.a)) accumulate(grads[n.a], g);
                if (needs_grad(n.b)) accumulate(grads[n.b], g);
                break;
            case Op::kMul:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::mul(g, nodes_[n.b].value));
                if (needs_grad(n.b)) accumulate(grads[n.b], ops::mul(g, nodes_[n.a].value));
                break;
            case Op::kAddRow:
                if (needs_grad(n.a)) accumulate(grads[n.a], g);
                if (needs_grad(n.b)) accumulate(grads[n.b], ops::column_sums(g));
                break;
            case Op::kScale:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::scale(g, n.scalar));
                break;
            case Op::kTranspose:
                if (needs_grad(n.a)) accumulate(grads[n.a], ops::transpose(g));
                break;
            case Op::kSoftmaxRows:
                if (needs_grad(n.a)) {
                    const Matrix& y = n.value;
                    Matrix dx(y.rows(), y.cols());
                    for (std::size_t i = 0; i < y.rows(); ++i) {
                        const double* yi = y.data() + i * y.cols();
                        const double* gi = g.data() + i * y.cols();
                        double dot = 0.0;
                        for (std::size_t j = 0; j < y.cols(); ++j) dot += gi[j] * yi[j];
                        double* di = dx.data() + i * y.cols();
                        for (std::size_t j = 0; j < y.cols(); ++j) di[j] = yi[j] * (gi[j] - dot) / n.scalar;
                    }
                    accumulate(grads[n.a], std::move(dx));
                }
                break;
            case Op::kRelu:
                if (needs_grad(n.a)) {
                    const Matrix& x = nodes_[n.a].value;
                    Matrix dx(x.rows(), x.cols());
                    for (std::size_t i = 0; i < x.size(); ++i) dx.data()[i] = x.data()[i] > 0.0 ? g.data()[i] : 0.0;
                    accumulate(grads[n.a], std::move(dx));
                }
                break;
            case Op::kSpmm:
                if (needs_grad(n.a)) accumulate(grads[n.a], gia::spmm(*n.sparse, g, /*transpose_op=*/true));
                break;
            case Op::kSum:
                if (needs_grad(n.a)) {
                    const Matrix& x = nodes_[n.a].value;
                    accumulate(grads[n.a], Matrix::full(x.rows(), x.cols(), g(0, 0)));
                }
                break;
            case Op::kWce:
                if (needs_grad(n.a)) {
                    const Matrix& lg = nodes_[n.a].value;
                    Matrix dx(lg.rows(), lg.cols());
                    const auto& w = *n.wce;
                    const std::size_t c = lg.cols();
                    const double inv_m = 1.0 / static_cast<double>(w.rows.size());
                    for (std::size_t m = 0; m < w.rows.size(); ++m) {
                        const double cw = w.class_weights[w.labels[m]] * inv_m * g(0, 0);
                        const double* p = w.probs.data() + m * c;
                        double* di = dx.data() + static_cast<std::size_t>(w.rows[m]) * c;
                        for (std::size_t j = 0; j < c; ++j) di[j] += cw * p[j];
                        di[w.labels[m]] -= cw;
                    }
                    accumulate(grads[n.a], std::move(dx));
                }
                break;
        }
    }

    std::vector<Matrix> out;
    out.reserve(wrt.size());
    for (NodeId id : wrt) {
        if (grads[id].empty()) {
            const Matrix& v = nodes_[id].value;
            out.emplace_back(v.rows(), v.cols());
        } else {
            out.push_back(std::move(grads[id]));
        }
    }
    return out;
}

}  // namespace gia
