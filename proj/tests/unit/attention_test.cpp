#include "camray/attention.hpp"
#include "camray/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace camray;

namespace {

const EncodingKind kKinds[] = {EncodingKind::cape, EncodingKind::gta, EncodingKind::prope, EncodingKind::ucpe_ray,
                               EncodingKind::ucpe_hybrid};

struct Scene {
    std::vector<CameraModel> cams;
    std::vector<Pose> poses;
    TokenGrid grid;
};

Scene random_scene(SplitMix64 &rng, int views, int rows, int cols, bool pinhole) {
    Scene s;
    for (int v = 0; v < views; ++v) {
        s.cams.push_back(pinhole ? CameraModel::pinhole(rng.uniform(60, 100), 64, 48)
                                 : CameraModel::ucm(rng.uniform(100, 170), rng.uniform(0, 0.9), 64, 48));
        s.poses.push_back(oracle::random_pose(rng));
    }
    s.grid = TokenGrid::patch_centers(s.cams, rows, cols);
    return s;
}

std::vector<TokenOperator> scene_operators(const Scene &s, EncodingKind kind, int head_dim) {
    OperatorOptions opts;
    opts.head_dim = head_dim;
    return build_operators(kind, s.cams, s.poses, s.grid, opts);
}

double rel(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(ApplyOperators, IdentityLeavesFeatures) {
    SplitMix64 rng(40);
    const Eigen::MatrixXd X = oracle::random_matrix(rng, 5, 16);
    std::vector<TokenOperator> ops(5, TokenOperator::identity(16));
    for (auto mode : {ApplyMode::direct, ApplyMode::transpose, ApplyMode::inverse}) {
        EXPECT_EQ(apply_operators(ops, X, mode), X);
    }
}

TEST(ApplyOperators, InverseUndoesDirect) {
    SplitMix64 rng(41);
    const Scene s = random_scene(rng, 2, 2, 3, true);
    for (auto kind : kKinds) {
        const auto ops = scene_operators(s, kind, 16);
        const Eigen::MatrixXd X = oracle::random_matrix(rng, ops.size(), 16);
        const auto Y = apply_operators(ops, apply_operators(ops, X, ApplyMode::direct), ApplyMode::inverse);
        EXPECT_LT((Y - X).norm(), 1e-12 * X.norm()) << to_string(kind);
    }
}

TEST(ApplyOperators, HomogeneousTranslation) {
    TokenOperator op = TokenOperator::identity(4);
    op.ray_block(0, 3) = 1.0;
    Eigen::MatrixXd X(1, 4);
    X << 1, 0, 0, 1;
    const auto Y = apply_operators(std::span<const TokenOperator>(&op, 1), X, ApplyMode::direct);
    EXPECT_EQ(Y(0, 0), 2.0);
    EXPECT_EQ(Y(0, 3), 1.0);
}

TEST(ApplyOperators, CountMismatchThrows) {
    std::vector<TokenOperator> ops(2, TokenOperator::identity(4));
    EXPECT_THROW(apply_operators(ops, Eigen::MatrixXd::Zero(3, 4), ApplyMode::direct), InputError);
}

TEST(Softmax, RowsSumToOne) {
    SplitMix64 rng(42);
    const Eigen::MatrixXd L = oracle::random_matrix(rng, 20, 30) * 50.0;
    const auto P = softmax_rows(L);
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        EXPECT_NEAR(P.row(i).sum(), 1.0, 1e-12);
    }
    Eigen::MatrixXd big(1, 3);
    big << 1e300, 1e300, -1e300;
    EXPECT_TRUE(softmax_rows(big).allFinite());
}

TEST(Attend, IdentityOperatorsReduceToVanilla) {
    SplitMix64 rng(43);
    const Eigen::MatrixXd Q = oracle::random_matrix(rng, 12, 16), K = oracle::random_matrix(rng, 12, 16),
                          V = oracle::random_matrix(rng, 12, 16);
    std::vector<TokenOperator> ops(12, TokenOperator::identity(16));
    const auto ref = scaled_dot_attention(Q, K, V);
    for (auto kind : kKinds) {
        EXPECT_LT((attend(Q, K, V, ops, kind) - ref).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Attend, DenseOracle) {
    SplitMix64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const Scene s = random_scene(rng, 2, 2, 2, true);
        for (auto kind : kKinds) {
            for (int dh : {8, 16}) {
                const auto ops = scene_operators(s, kind, dh);
                std::vector<Eigen::MatrixXd> blocks;
                for (const auto &op : ops) {
                    blocks.push_back(oracle::operator_matrix(op));
                }
                const Eigen::MatrixXd Q = oracle::random_matrix(rng, 8, dh), K = oracle::random_matrix(rng, 8, dh),
                                      V = oracle::random_matrix(rng, 8, dh);
                const auto ref = oracle::dense_attention(Q, K, V, blocks, kind);
                ASSERT_LT((attend(Q, K, V, ops, kind) - ref).cwiseAbs().maxCoeff(), 1e-10) << to_string(kind);
            }
        }
    }
}

TEST(Attend, OrthogonalOperatorsTransposeEqualsInverse) {
    SplitMix64 rng(45);
    std::vector<TokenOperator> ops;
    for (int t = 0; t < 6; ++t) {
        TokenOperator op;
        op.ray_dims = 8;
        op.rope_dims = 8;
        op.ray_block.topLeftCorner<3, 3>() = oracle::random_rotation(rng).matrix();
        op.ray_block_inverse = op.ray_block.transpose();
        op.rope_angles = rope_angles(t, 2 * t, 8);
        ops.push_back(op);
    }
    const Eigen::MatrixXd Q = oracle::random_matrix(rng, 6, 16), K = oracle::random_matrix(rng, 6, 16),
                          V = oracle::random_matrix(rng, 6, 16);
    const auto a = attend(Q, K, V, ops, EncodingKind::gta);
    const auto b = apply_operators(
        ops,
        scaled_dot_attention(apply_operators(ops, Q, ApplyMode::inverse), apply_operators(ops, K, ApplyMode::inverse),
                             apply_operators(ops, V, ApplyMode::inverse)),
        ApplyMode::direct);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attend, WorldFrameInvariance) {
    SplitMix64 rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        Scene s = random_scene(rng, 4, 4, 4, false);
        const Eigen::MatrixXd Q = oracle::random_matrix(rng, 64, 64), K = oracle::random_matrix(rng, 64, 64),
                              V = oracle::random_matrix(rng, 64, 64);
        const Pose G = oracle::random_pose(rng, 3.0);
        for (auto kind : {EncodingKind::gta, EncodingKind::ucpe_ray, EncodingKind::ucpe_hybrid}) {
            const auto a = multi_head_attend(Q, K, V, 4, scene_operators(s, kind, 16), kind);
            Scene moved = s;
            for (auto &p : moved.poses) {
                p = G * p;
            }
            const auto b = multi_head_attend(Q, K, V, 4, scene_operators(moved, kind, 16), kind);
            EXPECT_LT(rel(b, a), 1e-6) << to_string(kind);
        }
    }
}

TEST(Attend, PermutationEquivariant) {
    SplitMix64 rng(47);
    const Scene s = random_scene(rng, 2, 2, 3, true);
    const auto ops = scene_operators(s, EncodingKind::ucpe_hybrid, 16);
    const Eigen::MatrixXd Q = oracle::random_matrix(rng, 12, 16), K = oracle::random_matrix(rng, 12, 16),
                          V = oracle::random_matrix(rng, 12, 16);
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[2], perm[7]);
    Eigen::MatrixXd Qp(12, 16), Kp(12, 16), Vp(12, 16);
    std::vector<TokenOperator> opsp;
    for (int i = 0; i < 12; ++i) {
        Qp.row(i) = Q.row(perm[i]);
        Kp.row(i) = K.row(perm[i]);
        Vp.row(i) = V.row(perm[i]);
        opsp.push_back(ops[perm[i]]);
    }
    const auto a = attend(Q, K, V, ops, EncodingKind::ucpe_hybrid);
    const auto b = attend(Qp, Kp, Vp, opsp, EncodingKind::ucpe_hybrid);
    for (int i = 0; i < 12; ++i) {
        EXPECT_LT((b.row(i) - a.row(perm[i])).norm(), 1e-12);
    }
}

TEST(Adapter, ZeroInitIsNoOp) {
    SplitMix64 rng(48);
    AttentionConfig cfg;
    cfg.model_dim = 64;
    cfg.heads = 4;
    cfg.adapter.compression = 4;
    cfg.adapter.heads = 1;
    const Scene s = random_scene(rng, 2, 3, 4, false);
    const auto ops = build_operators(cfg.kind, s.cams, s.poses, s.grid, cfg.operator_options());
    const auto latup = latup_tokens(s.cams, s.poses, s.grid);
    const Eigen::MatrixXd X = oracle::random_matrix(rng, s.grid.size(), 64);
    for (auto placement : {Placement::parallel, Placement::pre, Placement::post}) {
        cfg.adapter.placement = placement;
        const auto w = WeightSet::random(cfg, 5);
        const auto base = base_attention(X, cfg, w);
        EXPECT_LE((block_forward(X, ops, latup, cfg, w) - base).cwiseAbs().maxCoeff(), 1e-12);
        const auto w2 = WeightSet::random(cfg, 5, false);
        EXPECT_GT((block_forward(X, ops, latup, cfg, w2) - base).norm(), 1e-6);
    }
}

TEST(Adapter, ParallelBlockMatchesBaseExactly) {
    SplitMix64 rng(49);
    AttentionConfig cfg;
    const Scene s = random_scene(rng, 1, 4, 4, true);
    const auto ops = build_operators(cfg.kind, s.cams, s.poses, s.grid, cfg.operator_options());
    const Eigen::MatrixXd X = oracle::random_matrix(rng, 16, cfg.model_dim);
    const auto w = WeightSet::random(cfg, 9);
    const auto base = base_attention(X, cfg, w);
    EXPECT_EQ(adapter_block(X, base, ops, {}, cfg, w), base);
}

TEST(Adapter, LatupDisabledEqualsZeroLatup) {
    SplitMix64 rng(50);
    AttentionConfig cfg;
    cfg.adapter.compression = 4;
    const Scene s = random_scene(rng, 1, 4, 4, true);
    const auto ops = build_operators(cfg.kind, s.cams, s.poses, s.grid, cfg.operator_options());
    const Eigen::MatrixXd X = oracle::random_matrix(rng, 16, cfg.model_dim);
    auto w = WeightSet::random(cfg, 10, false);
    AttentionConfig off = cfg;
    off.adapter.latup_bias = false;
    const auto a = adapter_path(X, ops, {}, off, w);
    w.latup_bias.setZero();
    const std::vector<Vec3> zeros(16, Vec3::Zero());
    const auto b = adapter_path(X, ops, zeros, cfg, w);
    EXPECT_EQ(a, b);
}

TEST(Adapter, PreNeedsBlockForward) {
    AttentionConfig cfg;
    cfg.adapter.placement = Placement::pre;
    const auto w = WeightSet::random(cfg, 1);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(1, cfg.model_dim);
    EXPECT_THROW(adapter_block(X, X, {}, {}, cfg, w), InputError);
}

TEST(Adapter, TableShapes) {
    AttentionConfig cfg;
    cfg.model_dim = 1536;
    cfg.heads = 12;
    cfg.kind = EncodingKind::ucpe_hybrid;
    const struct {
        int c, heads, head_dim;
        double millions;
    } rows[] = {{2, 6, 128, 141.0}, {4, 3, 128, 71.0}, {8, 1, 192, 35.6}, {12, 1, 128, 23.8}};
    for (const auto &r : rows) {
        cfg.adapter.compression = r.c;
        cfg.adapter.heads = r.heads;
        cfg.validate();
        EXPECT_EQ(cfg.adapter_head_dim(), r.head_dim);
        const double total = 30.0 * adapter_parameter_count(cfg) / 1e6;
        EXPECT_NEAR(total, r.millions, r.millions < 100 ? 0.05 : 1.0) << "C=" << r.c;
    }
}

TEST(Adapter, ConfigValidation) {
    AttentionConfig cfg;
    cfg.model_dim = 64;
    cfg.adapter.compression = 3;
    EXPECT_THROW(cfg.validate(), InputError);
    cfg.adapter.compression = 8;
    cfg.adapter.heads = 3;
    EXPECT_THROW(cfg.validate(), InputError);
    cfg.adapter.heads = 1;
    cfg.kind = EncodingKind::ucpe_hybrid;
    cfg.model_dim = 48;
    cfg.heads = 4;
    cfg.adapter.compression = 8;
    EXPECT_THROW(cfg.validate(), InputError);
}

TEST(Weights, CheckShapes) {
    AttentionConfig cfg;
    auto w = WeightSet::random(cfg, 3);
    EXPECT_NO_THROW(w.check(cfg));
    w.up.resize(2, 2);
    EXPECT_THROW(w.check(cfg), InputError);
}

TEST(Placement, StringRoundTrip) {
    for (auto p : {Placement::parallel, Placement::pre, Placement::post}) {
        EXPECT_EQ(placement_from_string(to_string(p)), p);
    }
    EXPECT_THROW(placement_from_string("side"), InputError);
}
