#pragma once

#include "camray/encodings.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace camray {

/// Token features, one row per token.
using Features = Eigen::MatrixXd;

enum class ApplyMode { direct, transpose, inverse };

/// Token-wise D ⊙ X for a single head: 4-chunks of the ray part are multiplied by the ray
/// block (or its transpose/inverse), 2-chunks of the RoPE part are rotated by ±angle.
Features apply_operators(std::span<const TokenOperator> ops, const Features &X, ApplyMode mode);

/// Row-wise softmax with max subtraction.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd &logits);

/// softmax(Q Kᵀ / √d_h) V.
Features scaled_dot_attention(const Features &Q, const Features &K, const Features &V);

/// Single-head attention with a relative encoding:
///   none  : Attn(Q, K, V)
///   cape  : Attn(Dᵀ⊙Q, D⁻¹⊙K, V)
///   others: D ⊙ Attn(Dᵀ⊙Q, D⁻¹⊙K, D⁻¹⊙V)
Features attend(const Features &Q, const Features &K, const Features &V, std::span<const TokenOperator> ops,
                EncodingKind kind);

/// Splits the feature dimension into `heads` equal heads, attends each with the same per-token
/// operators and concatenates.
Features multi_head_attend(const Features &Q, const Features &K, const Features &V, int heads,
                           std::span<const TokenOperator> ops, EncodingKind kind);

enum class Placement { parallel, pre, post };

std::string to_string(Placement p);
Placement placement_from_string(const std::string &s);

struct AdapterConfig {
    /// Adapter width is model_dim / compression.
    int compression = 8;
    int heads = 1;
    Placement placement = Placement::parallel;
    bool latup_bias = true;
};

struct AttentionConfig {
    int model_dim = 64;
    int heads = 4;
    EncodingKind kind = EncodingKind::ucpe_hybrid;
    /// Give cape/gta/prope the same RoPE half as the hybrid encoding.
    bool hybrid_rope = false;
    AdapterConfig adapter;

    int head_dim() const { return model_dim / heads; }
    int adapter_dim() const { return model_dim / adapter.compression; }
    int adapter_head_dim() const { return adapter_dim() / adapter.heads; }
    /// Throws InputError when the dimensions are inconsistent.
    void validate() const;
    /// Operator options matching the adapter heads.
    OperatorOptions operator_options() const;
};

/// Weights are stored as (in × out) so that projections read X · W.
struct WeightSet {
    Eigen::MatrixXd wq, wk, wv, wo;                 // d × d, frozen base attention
    Eigen::MatrixXd down_q, down_k, down_v;         // d × d/C
    Eigen::MatrixXd up;                             // d/C × d, zero at initialization
    Eigen::MatrixXd latup_proj;                     // 3 × d
    Eigen::RowVectorXd latup_bias;                  // 1 × d

    /// Gaussian weights scaled by 1/√fan_in; the up-projection is zero unless `zero_init_up` is false.
    static WeightSet random(const AttentionConfig &cfg, std::uint64_t seed, bool zero_init_up = true);
    void check(const AttentionConfig &cfg) const;
};

/// Frozen multi-head self-attention without camera encoding.
Features base_attention(const Features &X, const AttentionConfig &cfg, const WeightSet &w);

/// up( UCPEAttn(P_Q X', P_K X', P_V X') ) with X' = X + latup·L + b when the Lat-Up bias is on and
/// `latup` is non-empty.
Features adapter_path(const Features &X, std::span<const TokenOperator> ops, std::span<const Vec3> latup,
                      const AttentionConfig &cfg, const WeightSet &w);

/// Combines a precomputed base output with the adapter. Parallel feeds the block input to the
/// adapter, post feeds the base output. Pre placement wraps the base attention itself and is
/// only available through block_forward.
Features adapter_block(const Features &X, const Features &base_out, std::span<const TokenOperator> ops,
                       std::span<const Vec3> latup, const AttentionConfig &cfg, const WeightSet &w);

/// Full block:
///   parallel: base(X) + adapter(X)
///   pre     : base(X + adapter(X))
///   post    : base(X) + adapter(base(X))
Features block_forward(const Features &X, std::span<const TokenOperator> ops, std::span<const Vec3> latup,
                       const AttentionConfig &cfg, const WeightSet &w);

/// Trainable parameters of one adapter: three down-projections, the up-projection, and the
/// Lat-Up linear layer (weights + bias) when enabled.
std::int64_t adapter_parameter_count(const AttentionConfig &cfg);

/// Q/K/V/output projections of one full-width attention layer.
std::int64_t attention_parameter_count(const AttentionConfig &cfg);

}  // namespace camray
