#include "gia/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gia/error.hpp"

namespace gia {

PeMode pe_mode_from_string(std::string_view s) {
    if (s == "none") return PeMode::kNone;
    if (s == "linear") return PeMode::kLinear;
    if (s == "sinusoidal") return PeMode::kSinusoidal;
    if (s == "gia") return PeMode::kGia;
    throw ConfigError("unknown pe_mode '" + std::string(s) + "' (expected none|linear|sinusoidal|gia)");
}

std::string_view to_string(PeMode mode) {
    switch (mode) {
        case PeMode::kNone: return "none";
        case PeMode::kLinear: return "linear";
        case PeMode::kSinusoidal: return "sinusoidal";
        case PeMode::kGia: return "gia";
    }
    return "?";
}

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix m(fan_in, fan_out);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
    return m;
}

void require_pair(const Matrix& x_hat, const Matrix& p_hat, std::size_t d) {
    if (!x_hat.same_shape(p_hat) || x_hat.cols() != d) {
        throw ShapeError("attention: x_hat " + std::to_string(x_hat.rows()) + "x" + std::to_string(x_hat.cols()) +
                         " and p_hat " + std::to_string(p_hat.rows()) + "x" + std::to_string(p_hat.cols()) +
                         " must both be Nx" + std::to_string(d));
    }
}

}  // namespace

GiaParams GiaParams::init(std::size_t d_in, std::size_t d_latent, Rng rng) {
    if (d_latent < 1) throw ConfigError("gia: latent dimension must be >= 1");
    GiaParams p;
    p.w_embed = glorot(d_in, d_latent, rng);
    p.w_pos = glorot(2, d_latent, rng);
    p.b_pos = Matrix(1, d_latent);
    p.w_q = glorot(d_latent, d_latent, rng);
    p.w_k = glorot(d_latent, d_latent, rng);
    p.w_v = glorot(d_latent, d_latent, rng);
    p.w_res = glorot(d_latent, d_latent, rng);
    p.b_res = Matrix(1, d_latent);
    return p;
}

Matrix conventional_cross_attention(const Matrix& x_hat, const Matrix& p_hat, const GiaParams& params) {
    const std::size_t d = params.latent_dim();
    require_pair(x_hat, p_hat, d);

    Matrix q_proj, k_proj, v_proj;
    if (params.use_qkv) {
        q_proj = ops::matmul(x_hat, params.w_q);
        k_proj = ops::matmul(p_hat, params.w_k);
        v_proj = ops::matmul(p_hat, params.w_v);
    }
    const Matrix& q = params.use_qkv ? q_proj : x_hat;
    const Matrix& k = params.use_qkv ? k_proj : p_hat;
    const Matrix& v = params.use_qkv ? v_proj : p_hat;

    // N×N score matrix; this is the expensive reference path.
    Matrix scores = ops::matmul_bt(q, k);
    Matrix weights = ops::softmax_rows(scores, std::sqrt(static_cast<double>(d)));
    return ops::matmul(weights, v);
}

Matrix transpose_cross_attention(const Matrix& x_hat, const Matrix& p_hat, const GiaParams& params) {
    const std::size_t d = params.latent_dim();
    require_pair(x_hat, p_hat, d);
    const std::size_t n = x_hat.rows();
    if (n < 1) throw ShapeError("transpose_cross_attention: empty input");

    Matrix q_proj, k_proj, v_proj;
    if (params.use_qkv) {
        q_proj = ops::matmul(x_hat, params.w_q);
        k_proj = ops::matmul(p_hat, params.w_k);
        v_proj = ops::matmul(p_hat, params.w_v);
    }
    const Matrix& q = params.use_qkv ? q_proj : x_hat;
    const Matrix& k = params.use_qkv ? k_proj : p_hat;
    const Matrix& v = params.use_qkv ? v_proj : p_hat;

    // Dn×Dn score matrix; nothing here grows with N².
    Matrix scores = ops::matmul_at(q, k);
    Matrix weights = ops::softmax_rows(scores, std::sqrt(static_cast<double>(n)));
    return ops::matmul_bt(v, weights);
}

Matrix sinusoidal_encode(const Matrix& p, std::size_t d_latent) {
    if (p.cols() != 2) throw ShapeError("sinusoidal_encode: positions must have 2 columns");
    if (d_latent % 4 != 0) {
        throw ConfigError("sinusoidal_encode: latent dimension " + std::to_string(d_latent) +
                          " must be divisible by 4");
    }
    const std::size_t n = p.rows();
    const std::size_t bands = d_latent / 4;

    // Raw coordinates have tiny dynamic range; rescale to [0, 2π] per axis.
    Matrix scaled(n, 2);
    for (std::size_t c = 0; c < 2; ++c) {
        double lo = p(0, c), hi = p(0, c);
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, p(i, c));
            hi = std::max(hi, p(i, c));
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            scaled(i, c) = span > 0.0 ? (p(i, c) - lo) / span * 2.0 * std::numbers::pi : 0.0;
        }
    }

    Matrix enc(n, d_latent);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            const std::size_t base = c * 2 * bands;
            for (std::size_t b = 0; b < bands; ++b) {
                const double freq =
                    std::pow(10000.0, 4.0 * static_cast<double>(b) / static_cast<double>(d_latent));
                enc(i, base + 2 * b) = std::sin(scaled(i, c) / freq);
                enc(i, base + 2 * b + 1) = std::cos(scaled(i, c) / freq);
            }
        }
    }
    return enc;
}

Matrix gia_forward(const Matrix& x, const Matrix& p, const GiaParams& params) {
    if (p.cols() != 2) throw ShapeError("gia_forward: positions must have 2 columns");
    if (x.rows() != p.rows()) {
        throw ShapeError("gia_forward: x has " + std::to_string(x.rows()) + " rows, p has " +
                         std::to_string(p.rows()));
    }

    Matrix x_hat = ops::matmul(x, params.w_embed);
    switch (params.pe_mode) {
        case PeMode::kNone:
            return x_hat;
        case PeMode::kSinusoidal:
            return ops::add(x_hat, sinusoidal_encode(p, params.latent_dim()));
        case PeMode::kLinear: {
            Matrix p_hat = ops::add_row_broadcast(ops::matmul(p, params.w_pos), params.b_pos);
            return ops::add(x_hat, p_hat);
        }
        case PeMode::kGia: {
            Matrix p_hat = ops::add_row_broadcast(ops::matmul(p, params.w_pos), params.b_pos);
            Matrix residual = params.residual_source == ResidualSource::kFeatures
                                  ? ops::add_row_broadcast(ops::matmul(x_hat, params.w_res), params.b_res)
                                  : ops::add(x_hat, p_hat);
            return ops::add(residual, transpose_cross_attention(x_hat, p_hat, params));
        }
    }
    throw ConfigError("gia_forward: unknown pe_mode");
}

std::size_t rank_of_scores(const Matrix& x_hat, const Matrix& p_hat) {
    if (x_hat.rows() != p_hat.rows()) {
        throw ShapeError("rank_of_scores: row counts disagree");
    }
    Matrix m = ops::matmul_at(x_hat, p_hat);
    if (m.rows() < m.cols()) m = ops::transpose(m);
    const std::size_t rows = m.rows(), cols = m.cols();

    // One-sided Jacobi: orthogonalize column pairs, singular values are the
    // resulting column norms.
    bool changed = true;
    for (int sweep = 0; sweep < 64 && changed; ++sweep) {
        changed = false;
        for (std::size_t a = 0; a + 1 < cols; ++a) {
            for (std::size_t b = a + 1; b < cols; ++b) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += m(i, a) * m(i, a);
                    beta += m(i, b) * m(i, b);
                    gamma += m(i, a) * m(i, b);
                }
                if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double va = m(i, a), vb = m(i, b);
                    m(i, a) = c * va - s * vb;
                    m(i, b) = s * va + c * vb;
                }
                changed = true;
            }
        }
    }

    std::vector<double> sigma(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm2 += m(i, j) * m(i, j);
        sigma[j] = std::sqrt(norm2);
    }
    const double sigma_max = *std::max_element(sigma.begin(), sigma.end());
    const double threshold =
        sigma_max * static_cast<double>(std::max(x_hat.rows(), x_hat.cols())) * 1e-12;
    std::size_t rank = 0;
    for (double s : sigma) {
        if (s > threshold && s > 0.0) ++rank;
    }
    return rank;
}

GiaParamNodes register_gia_params(Tape& tape, const GiaParams& params) {
    GiaParamNodes ids{};
    ids.w_embed = tape.param(params.w_embed);
    ids.w_pos = tape.param(params.w_pos);
    ids.b_pos = tape.param(params.b_pos);
    ids.w_q = tape.param(params.w_q);
    ids.w_k = tape.param(params.w_k);
    ids.w_v = tape.param(params.w_v);
    ids.w_res = tape.param(params.w_res);
    ids.b_res = tape.param(params.b_res);
    return ids;
}

Tape::NodeId transpose_cross_attention(Tape& tape, Tape::NodeId x_hat, Tape::NodeId p_hat,
                                       const GiaParamNodes& ids, const GiaParams& cfg) {
    const std::size_t n = tape.value(x_hat).rows();
    Tape::NodeId q = x_hat, k = p_hat, v = p_hat;
    if (cfg.use_qkv) {
        q = tape.matmul(x_hat, ids.w_q);
        k = tape.matmul(p_hat, ids.w_k);
        v = tape.matmul(p_hat, ids.w_v);
    }
    Tape::NodeId scores = tape.matmul_at(q, k);
    Tape::NodeId weights = tape.softmax_rows(scores, std::sqrt(static_cast<double>(n)));
    return tape.matmul_bt(v, weights);
}

Tape::NodeId conventional_cross_attention(Tape& tape, Tape::NodeId x_hat, Tape::NodeId p_hat,
                                          const GiaParamNodes& ids, const GiaParams& cfg) {
    const std::size_t d = tape.value(x_hat).cols();
    Tape::NodeId q = x_hat, k = p_hat, v = p_hat;
    if (cfg.use_qkv) {
        q = tape.matmul(x_hat, ids.w_q);
        k = tape.matmul(p_hat, ids.w_k);
        v = tape.matmul(p_hat, ids.w_v);
    }
    Tape::NodeId scores = tape.matmul_bt(q, k);
    Tape::NodeId weights = tape.softmax_rows(scores, std::sqrt(static_cast<double>(d)));
    return tape.matmul(weights, v);
}

Tape::NodeId gia_forward(Tape& tape, const Matrix& x, const Matrix& p, const GiaParamNodes& ids,
                         const GiaParams& cfg) {
    if (p.cols() != 2) throw ShapeError("gia_forward: positions must have 2 columns");
    Tape::NodeId xn = tape.constant(x);
    Tape::NodeId x_hat = tape.matmul(xn, ids.w_embed);
    switch (cfg.pe_mode) {
        case PeMode::kNone:
            return x_hat;
        case PeMode::kSinusoidal: {
            Tape::NodeId enc = tape.constant(sinusoidal_encode(p, tape.value(ids.w_pos).cols()));
            return tape.add(x_hat, enc);
        }
        case PeMode::kLinear: {
            Tape::NodeId pn = tape.constant(p);
            Tape::NodeId p_hat = tape.add_row(tape.matmul(pn, ids.w_pos), ids.b_pos);
            return tape.add(x_hat, p_hat);
        }
        case PeMode::kGia: {
            Tape::NodeId pn = tape.constant(p);
            Tape::NodeId p_hat = tape.add_row(tape.matmul(pn, ids.w_pos), ids.b_pos);
            Tape::NodeId residual = cfg.residual_source == ResidualSource::kFeatures
                                        ? tape.add_row(tape.matmul(x_hat, ids.w_res), ids.b_res)
                                        : tape.add(x_hat, p_hat);
            return tape.add(residual, transpose_cross_attention(tape, x_hat, p_hat, ids, cfg));
        }
    }
    throw ConfigError("gia_forward: unknown pe_mode");
}

}  // namespace gia
