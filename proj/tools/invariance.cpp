#include "invariance.hpp"

#include "camray/rng.hpp"

#include <Eigen/LU>

#include <cmath>

namespace camray::cli {

namespace {

Eigen::MatrixXd gaussian(SplitMix64 &rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

Pose random_pose(SplitMix64 &rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return {Rotation3(q.toRotationMatrix()), Vec3(rng.normal(), rng.normal(), rng.normal())};
}

std::vector<TokenOperator> identity_operators(const AttentionConfig &cfg, size_t count) {
    TokenOperator op;
    std::tie(op.ray_dims, op.rope_dims) = operator_layout(cfg.kind, cfg.operator_options());
    op.rope_angles.assign(op.rope_dims / 2, 0.0);
    return std::vector<TokenOperator>(count, op);
}

// Explicit blkdiag(D_1..D_T) algebra on stacked token vectors.
Eigen::MatrixXd dense_attention(const Eigen::MatrixXd &Q, const Eigen::MatrixXd &K, const Eigen::MatrixXd &V,
                                const std::vector<TokenOperator> &ops, EncodingKind kind) {
    const Eigen::Index T = Q.rows(), n = Q.cols();
    auto stack = [&](const Eigen::MatrixXd &X) {
        Eigen::VectorXd v(T * n);
        for (Eigen::Index i = 0; i < T; ++i) {
            v.segment(i * n, n) = X.row(i).transpose();
        }
        return v;
    };
    auto unstack = [&](const Eigen::VectorXd &v) {
        Eigen::MatrixXd X(T, n);
        for (Eigen::Index i = 0; i < T; ++i) {
            X.row(i) = v.segment(i * n, n).transpose();
        }
        return X;
    };
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(T * n, T * n);
    if (kind != EncodingKind::none) {
        for (Eigen::Index i = 0; i < T; ++i) {
            D.block(i * n, i * n, n, n) = ops[i].dense();
        }
    }
    const Eigen::MatrixXd Dinv = D.fullPivLu().inverse();
    const Eigen::MatrixXd q = unstack(D.transpose() * stack(Q));
    const Eigen::MatrixXd k = unstack(Dinv * stack(K));
    const bool values = kind != EncodingKind::none && kind != EncodingKind::cape;
    const Eigen::MatrixXd v = values ? unstack(Dinv * stack(V)) : V;
    Eigen::MatrixXd logits = q * k.transpose() / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < T; ++i) {
        logits.row(i) = (logits.row(i).array() - logits.row(i).maxCoeff()).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    const Eigen::MatrixXd out = logits * v;
    return values ? unstack(D * stack(out)) : out;
}

double max_abs(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

SuiteConfig suite_config_from_json(const json &j) {
    SuiteConfig c;
    c.attention = attention_config_from_json(j);
    if (j.contains("camera")) {
        c.camera = camera_from_json(j.at("camera"));
    }
    if (j.contains("tokens")) {
        const auto &t = j.at("tokens");
        c.views = t.value("views", c.views);
        c.rows = t.value("rows", c.rows);
        c.cols = t.value("cols", c.cols);
    }
    c.trials = j.value("trials", c.trials);
    if (c.views < 1 || c.rows < 1 || c.cols < 1 || c.trials < 1) {
        throw InputError("token grid and trial counts must be positive");
    }
    return c;
}

std::vector<InvarianceRow> run_invariance_suite(const SuiteConfig &cfg, std::uint64_t seed) {
    const AttentionConfig &ac = cfg.attention;
    ac.validate();
    SplitMix64 rng(seed);
    const std::vector<CameraModel> cams(cfg.views, cfg.camera);
    std::vector<Pose> poses;
    for (int v = 0; v < cfg.views; ++v) {
        poses.push_back(random_pose(rng));
    }
    const auto grid = TokenGrid::patch_centers(cams, cfg.rows, cfg.cols);
    const auto opts = ac.operator_options();
    const auto ops = build_operators(ac.kind, cams, poses, grid, opts);
    const auto latup = latup_tokens(cams, poses, grid);
    const Eigen::Index T = static_cast<Eigen::Index>(grid.size());
    const int a = ac.adapter_dim();

    std::vector<InvarianceRow> rows;

    {
        const auto id = identity_operators(ac, grid.size());
        InvarianceRow r{"identity_reduction", 0.0, 1e-12};
        for (int t = 0; t < cfg.trials; ++t) {
            const auto Q = gaussian(rng, T, a), K = gaussian(rng, T, a), V = gaussian(rng, T, a);
            r.deviation = std::max(r.deviation, max_abs(multi_head_attend(Q, K, V, ac.adapter.heads, id, ac.kind),
                                                        multi_head_attend(Q, K, V, ac.adapter.heads, id,
                                                                          EncodingKind::none)));
        }
        rows.push_back(r);
    }

    {
        InvarianceRow r{"world_frame_invariance", 0.0, 1e-6};
        const auto w = WeightSet::random(ac, rng.next(), false);
        const auto X = gaussian(rng, T, ac.model_dim);
        const auto ref = adapter_path(X, ops, {}, ac, w);
        for (int t = 0; t < cfg.trials; ++t) {
            const Pose G = random_pose(rng);
            std::vector<Pose> moved;
            for (const auto &p : poses) {
                moved.push_back(G * p);
            }
            const auto out = adapter_path(X, build_operators(ac.kind, cams, moved, grid, opts), {}, ac, w);
            r.deviation = std::max(r.deviation, (out - ref).norm() / ref.norm());
        }
        rows.push_back(r);
    }

    {
        InvarianceRow r{"dense_oracle_equivalence", 0.0, 1e-10};
        const Eigen::Index n = std::min<Eigen::Index>(T, 8);
        const std::vector<TokenOperator> sub(ops.begin(), ops.begin() + n);
        const int dh = ac.adapter_head_dim();
        for (int t = 0; t < cfg.trials; ++t) {
            const auto Q = gaussian(rng, n, dh), K = gaussian(rng, n, dh), V = gaussian(rng, n, dh);
            r.deviation =
                std::max(r.deviation, max_abs(attend(Q, K, V, sub, ac.kind), dense_attention(Q, K, V, sub, ac.kind)));
        }
        rows.push_back(r);
    }

    {
        InvarianceRow r{"zero_init_noop", 0.0, 1e-12};
        for (int t = 0; t < cfg.trials; ++t) {
            const auto w = WeightSet::random(ac, rng.next(), true);
            const auto X = gaussian(rng, T, ac.model_dim);
            r.deviation = std::max(r.deviation, max_abs(block_forward(X, ops, latup, ac, w), base_attention(X, ac, w)));
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace camray::cli
