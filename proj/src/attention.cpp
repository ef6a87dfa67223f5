#include "camray/attention.hpp"

#include "camray/rng.hpp"

#include <cmath>

namespace camray {

Features apply_operators(std::span<const TokenOperator> ops, const Features &X, ApplyMode mode) {
    if (static_cast<Eigen::Index>(ops.size()) != X.rows()) {
        throw InputError("operator count " + std::to_string(ops.size()) + " does not match token count " +
                         std::to_string(X.rows()));
    }
    Features out(X.rows(), X.cols());
    for (Eigen::Index t = 0; t < X.rows(); ++t) {
        const auto &op = ops[t];
        if (op.head_dim() != X.cols()) {
            throw InputError("operator layout (" + std::to_string(op.head_dim()) + ") does not match feature dim " +
                             std::to_string(X.cols()));
        }
        Mat4 M;
        switch (mode) {
            case ApplyMode::direct:
                M = op.ray_block;
                break;
            case ApplyMode::transpose:
                M = op.ray_block.transpose();
                break;
            case ApplyMode::inverse:
                M = op.ray_block_inverse;
                break;
        }
        for (int b = 0; b + 4 <= op.ray_dims; b += 4) {
            out.row(t).segment<4>(b) = (M * X.row(t).segment<4>(b).transpose()).transpose();
        }
        for (int b = op.ray_dims - op.ray_dims % 4; b < op.ray_dims; ++b) {
            out(t, b) = X(t, b);
        }
        const double sign = mode == ApplyMode::direct ? 1.0 : -1.0;
        for (size_t j = 0; j < op.rope_angles.size(); ++j) {
            const int o = op.ray_dims + 2 * static_cast<int>(j);
            const double c = std::cos(op.rope_angles[j]), s = sign * std::sin(op.rope_angles[j]);
            const double a = X(t, o), b = X(t, o + 1);
            out(t, o) = c * a - s * b;
            out(t, o + 1) = s * a + c * b;
        }
    }
    return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd &logits) {
    Eigen::MatrixXd p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index j = 0; j < logits.cols(); ++j) {
            p(i, j) = std::exp(logits(i, j) - m);
            sum += p(i, j);
        }
        p.row(i) /= sum;
    }
    return p;
}

Features scaled_dot_attention(const Features &Q, const Features &K, const Features &V) {
    if (Q.cols() != K.cols() || K.rows() != V.rows()) {
        throw InputError("attention shape mismatch");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(Q.cols()));
    return softmax_rows((Q * K.transpose()) * scale) * V;
}

Features attend(const Features &Q, const Features &K, const Features &V, std::span<const TokenOperator> ops,
                EncodingKind kind) {
    switch (kind) {
        case EncodingKind::none:
            return scaled_dot_attention(Q, K, V);
        case EncodingKind::cape:
            return scaled_dot_attention(apply_operators(ops, Q, ApplyMode::transpose),
                                        apply_operators(ops, K, ApplyMode::inverse), V);
        case EncodingKind::gta:
        case EncodingKind::prope:
        case EncodingKind::ucpe_ray:
        case EncodingKind::ucpe_hybrid: {
            const Features O = scaled_dot_attention(apply_operators(ops, Q, ApplyMode::transpose),
                                                    apply_operators(ops, K, ApplyMode::inverse),
                                                    apply_operators(ops, V, ApplyMode::inverse));
            return apply_operators(ops, O, ApplyMode::direct);
        }
    }
    throw InputError("unknown encoding kind");
}

Features multi_head_attend(const Features &Q, const Features &K, const Features &V, int heads,
                           std::span<const TokenOperator> ops, EncodingKind kind) {
    if (heads < 1 || Q.cols() % heads != 0 || K.cols() != Q.cols() || V.cols() != Q.cols()) {
        throw InputError("feature dim " + std::to_string(Q.cols()) + " not divisible into " + std::to_string(heads) +
                         " heads");
    }
    const Eigen::Index dh = Q.cols() / heads;
    Features out(Q.rows(), Q.cols());
    for (int h = 0; h < heads; ++h) {
        out.middleCols(h * dh, dh) =
            attend(Q.middleCols(h * dh, dh), K.middleCols(h * dh, dh), V.middleCols(h * dh, dh), ops, kind);
    }
    return out;
}

std::string to_string(Placement p) {
    switch (p) {
        case Placement::parallel:
            return "parallel";
        case Placement::pre:
            return "pre";
        case Placement::post:
            return "post";
    }
    return "unknown";
}

Placement placement_from_string(const std::string &s) {
    if (s == "parallel") return Placement::parallel;
    if (s == "pre") return Placement::pre;
    if (s == "post") return Placement::post;
    throw InputError("unknown adapter placement '" + s + "'");
}

void AttentionConfig::validate() const {
    if (model_dim < 1 || heads < 1 || model_dim % heads != 0) {
        throw InputError("model_dim must be a positive multiple of heads");
    }
    if (adapter.compression < 1 || model_dim % adapter.compression != 0) {
        throw InputError("model_dim must be divisible by the adapter compression");
    }
    if (adapter.heads < 1 || adapter_dim() % adapter.heads != 0) {
        throw InputError("adapter dim " + std::to_string(adapter_dim()) + " not divisible by adapter heads " +
                         std::to_string(adapter.heads));
    }
    operator_layout(kind, operator_options());
}

OperatorOptions AttentionConfig::operator_options() const {
    OperatorOptions o;
    o.head_dim = adapter_head_dim();
    o.hybrid_rope = hybrid_rope;
    return o;
}

namespace {

Eigen::MatrixXd gaussian(SplitMix64 &rng, Eigen::Index rows, Eigen::Index cols) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = rng.normal() * scale;
        }
    }
    return m;
}

}  // namespace

WeightSet WeightSet::random(const AttentionConfig &cfg, std::uint64_t seed, bool zero_init_up) {
    cfg.validate();
    SplitMix64 rng(seed);
    const int d = cfg.model_dim, a = cfg.adapter_dim();
    WeightSet w;
    w.wq = gaussian(rng, d, d);
    w.wk = gaussian(rng, d, d);
    w.wv = gaussian(rng, d, d);
    w.wo = gaussian(rng, d, d);
    w.down_q = gaussian(rng, d, a);
    w.down_k = gaussian(rng, d, a);
    w.down_v = gaussian(rng, d, a);
    w.up = zero_init_up ? Eigen::MatrixXd::Zero(a, d) : gaussian(rng, a, d);
    w.latup_proj = gaussian(rng, 3, d);
    w.latup_bias = gaussian(rng, 1, d).row(0);
    return w;
}

void WeightSet::check(const AttentionConfig &cfg) const {
    const Eigen::Index d = cfg.model_dim, a = cfg.adapter_dim();
    auto expect = [](const Eigen::MatrixXd &m, Eigen::Index r, Eigen::Index c, const char *name) {
        if (m.rows() != r || m.cols() != c) {
            throw InputError(std::string("weight '") + name + "' has shape " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " + std::to_string(r) + "x" + std::to_string(c));
        }
    };
    expect(wq, d, d, "wq");
    expect(wk, d, d, "wk");
    expect(wv, d, d, "wv");
    expect(wo, d, d, "wo");
    expect(down_q, d, a, "down_q");
    expect(down_k, d, a, "down_k");
    expect(down_v, d, a, "down_v");
    expect(up, a, d, "up");
    expect(latup_proj, 3, d, "latup_proj");
    if (latup_bias.size() != d) {
        throw InputError("weight 'latup_bias' has the wrong length");
    }
}

Features base_attention(const Features &X, const AttentionConfig &cfg, const WeightSet &w) {
    return multi_head_attend(X * w.wq, X * w.wk, X * w.wv, cfg.heads, {}, EncodingKind::none) * w.wo;
}

Features adapter_path(const Features &X, std::span<const TokenOperator> ops, std::span<const Vec3> latup,
                      const AttentionConfig &cfg, const WeightSet &w) {
    Features Xb = X;
    if (cfg.adapter.latup_bias && !latup.empty()) {
        if (static_cast<Eigen::Index>(latup.size()) != X.rows()) {
            throw InputError("Lat-Up token count does not match token count");
        }
        for (Eigen::Index t = 0; t < X.rows(); ++t) {
            Xb.row(t) += latup[t].transpose() * w.latup_proj + w.latup_bias;
        }
    }
    const Features O = multi_head_attend(Xb * w.down_q, Xb * w.down_k, Xb * w.down_v, cfg.adapter.heads, ops, cfg.kind);
    return O * w.up;
}

Features adapter_block(const Features &X, const Features &base_out, std::span<const TokenOperator> ops,
                       std::span<const Vec3> latup, const AttentionConfig &cfg, const WeightSet &w) {
    switch (cfg.adapter.placement) {
        case Placement::parallel:
            return base_out + adapter_path(X, ops, latup, cfg, w);
        case Placement::post:
            return base_out + adapter_path(base_out, ops, latup, cfg, w);
        case Placement::pre:
            break;
    }
    throw InputError("pre-attention placement must run through block_forward");
}

Features block_forward(const Features &X, std::span<const TokenOperator> ops, std::span<const Vec3> latup,
                       const AttentionConfig &cfg, const WeightSet &w) {
    if (cfg.adapter.placement == Placement::pre) {
        return base_attention(X + adapter_path(X, ops, latup, cfg, w), cfg, w);
    }
    return adapter_block(X, base_attention(X, cfg, w), ops, latup, cfg, w);
}

std::int64_t adapter_parameter_count(const AttentionConfig &cfg) {
    const std::int64_t d = cfg.model_dim, a = cfg.adapter_dim();
    std::int64_t n = 3 * d * a + a * d;
    if (cfg.adapter.latup_bias) {
        n += 3 * d + d;
    }
    return n;
}

std::int64_t attention_parameter_count(const AttentionConfig &cfg) {
    const std::int64_t d = cfg.model_dim;
    return 4 * d * d;
}

}  // namespace camray
