#pragma once

#include <cstdint>
#include <vector>

#include "gia/error.hpp"
#include "gia/matrix.hpp"

namespace gia {

// Square sparse operator stored as an edge list: out[row] += w * in[col].
// This is the aggregation primitive for the GNN hosts; no dense N×N matrix
// is ever formed.
struct SparseOp {
    struct Entry {
        std::uint32_t row;
        std::uint32_t col;
        double w;
    };

    std::size_t n = 0;
    std::vector<Entry> entries;
};

// out = op · h, or opᵀ · h when transpose_op is set.
inline Matrix spmm(const SparseOp& op, const Matrix& h, bool transpose_op = false) {
    if (h.rows() != op.n) {
        throw ShapeError("spmm: operator is " + std::to_string(op.n) + "x" + std::to_string(op.n) +
                         " but input has " + std::to_string(h.rows()) + " rows");
    }
    Matrix out(op.n, h.cols());
    const std::size_t d = h.cols();
    for (const auto& e : op.entries) {
        const std::uint32_t r = transpose_op ? e.col : e.row;
        const std::uint32_t c = transpose_op ? e.row : e.col;
        const double* src = h.data() + static_cast<std::size_t>(c) * d;
        double* dst = out.data() + static_cast<std::size_t>(r) * d;
        for (std::size_t j = 0; j < d; ++j) dst[j] += e.w * src[j];
    }
    return out;
}

}  // namespace gia
