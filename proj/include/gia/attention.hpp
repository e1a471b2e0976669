#pragma once

#include <cstddef>
#include <string_view>

#include "gia/matrix.hpp"
#include "gia/rng.hpp"
#include "gia/tape.hpp"

namespace gia {

enum class PeMode { kNone, kLinear, kSinusoidal, kGia };
enum class ResidualSource { kFeatures, kFeaturesPlusPositions };

PeMode pe_mode_from_string(std::string_view s);
std::string_view to_string(PeMode mode);

// Learnable state of the GIA block. The embedding belongs to the host
// network; it lives here so the block is self-contained.
struct GiaParams {
    Matrix w_embed;          // D1×Dn
    Matrix w_pos;            // 2×Dn
    Matrix b_pos;            // 1×Dn
    Matrix w_q, w_k, w_v;    // Dn×Dn
    Matrix w_res;            // Dn×Dn
    Matrix b_res;            // 1×Dn

    PeMode pe_mode = PeMode::kGia;
    bool use_qkv = true;
    ResidualSource residual_source = ResidualSource::kFeatures;

    std::size_t latent_dim() const { return w_pos.cols(); }
    std::size_t input_dim() const { return w_embed.rows(); }

    // Uniform ±sqrt(6/(fan_in+fan_out)) weights, zero biases.
    static GiaParams init(std::size_t d_in, std::size_t d_latent, Rng rng);
};

// Node-wise attention reference path: softmax((Q·Kᵀ)/√Dn)·V with an
// explicit N×N score matrix.
Matrix conventional_cross_attention(const Matrix& x_hat, const Matrix& p_hat, const GiaParams& params);

// Feature-wise attention: S = softmax((Qᵀ·K)/√N) is Dn×Dn; the raw S·Vᵀ
// is returned transposed as V·Sᵀ (N×Dn) so it composes with the residual.
// Never materializes anything quadratic in N.
Matrix transpose_cross_attention(const Matrix& x_hat, const Matrix& p_hat, const GiaParams& params);

// Fixed sin/cos encoding of 2-D positions; d_latent must be divisible by 4.
// Coordinates are min-max scaled to [0, 2π] over the graph first.
Matrix sinusoidal_encode(const Matrix& p, std::size_t d_latent);

// Full block: learned residual plus transpose cross-attention, or one of
// the ablation arms selected by pe_mode.
Matrix gia_forward(const Matrix& x, const Matrix& p, const GiaParams& params);

// Numerical rank of x_hatᵀ·p_hat via Jacobi singular values, threshold
// σ_max · max(N, Dn) · 1e-12.
std::size_t rank_of_scores(const Matrix& x_hat, const Matrix& p_hat);

// --- taped variants (identical arithmetic, recorded for gradients) ---

struct GiaParamNodes {
    Tape::NodeId w_embed, w_pos, b_pos, w_q, w_k, w_v, w_res, b_res;
};

GiaParamNodes register_gia_params(Tape& tape, const GiaParams& params);

Tape::NodeId transpose_cross_attention(Tape& tape, Tape::NodeId x_hat, Tape::NodeId p_hat,
                                       const GiaParamNodes& ids, const GiaParams& cfg);
Tape::NodeId conventional_cross_attention(Tape& tape, Tape::NodeId x_hat, Tape::NodeId p_hat,
                                          const GiaParamNodes& ids, const GiaParams& cfg);
Tape::NodeId gia_forward(Tape& tape, const Matrix& x, const Matrix& p, const GiaParamNodes& ids,
                         const GiaParams& cfg);

}  // namespace gia
