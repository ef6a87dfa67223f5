#include "camray/encodings.hpp"

#include "camray/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace camray {

namespace {

constexpr double kDegenerate = 1e-6;

Vec3 camera_down(const Pose &pose) { return pose.rotation * Vec3::UnitY(); }
Vec3 camera_right(const Pose &pose) { return pose.rotation * Vec3::UnitX(); }

}  // namespace

Mat4 RayFrame::to_world() const {
    Mat4 T = Mat4::Identity();
    T.topLeftCorner<3, 3>() = rotation.matrix();
    T.topRightCorner<3, 1>() = origin;
    return T;
}

Mat4 RayFrame::from_world() const { return se3_inverse(to_world()); }

RayFrame ray_frame(const Ray &ray, const Vec3 &cam_down, const std::optional<Vec3> &cam_right) {
    const Vec3 z = ray.direction.normalized();
    std::array<Vec3, 4> candidates = {cam_down, cam_right.value_or(Vec3::UnitX()), Vec3::UnitX(), Vec3::UnitY()};
    Vec3 x = Vec3::Zero();
    for (const auto &c : candidates) {
        const Vec3 k = c.cross(z);
        if (k.norm() >= kDegenerate) {
            x = k.normalized();
            break;
        }
    }
    const Vec3 y = z.cross(x).normalized();
    Mat3 m;
    m.col(0) = x;
    m.col(1) = y;
    m.col(2) = z;
    return {Rotation3::unchecked(m), ray.origin};
}

TokenGrid TokenGrid::patch_centers(const std::vector<CameraModel> &cams, int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw InputError("token grid needs at least one row and column");
    }
    TokenGrid g;
    g.tokens.reserve(cams.size() * rows * cols);
    for (size_t i = 0; i < cams.size(); ++i) {
        const double sx = static_cast<double>(cams[i].width()) / cols;
        const double sy = static_cast<double>(cams[i].height()) / rows;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                g.tokens.push_back({static_cast<int>(i), r, c, static_cast<int>(i), {(c + 0.5) * sx, (r + 0.5) * sy}});
            }
        }
    }
    return g;
}

RayOperators ray_operators(const std::vector<CameraModel> &cams, const std::vector<Pose> &poses,
                           const TokenGrid &grid) {
    if (cams.size() != poses.size()) {
        throw InputError("camera and pose counts differ");
    }
    RayOperators ops;
    ops.world_to_ray.assign(grid.size(), Mat4::Identity());
    ops.valid.assign(grid.size(), 0);
    for (size_t t = 0; t < grid.size(); ++t) {
        const auto &tok = grid.tokens[t];
        if (tok.camera < 0 || static_cast<size_t>(tok.camera) >= cams.size()) {
            throw InputError("token camera index out of range");
        }
        const auto &pose = poses[tok.camera];
        const auto d = cams[tok.camera].try_unproject(tok.pixel);
        if (!d) {
            continue;
        }
        const Ray world{pose.translation, pose.rotation * *d};
        ops.world_to_ray[t] = ray_frame(world, camera_down(pose), camera_right(pose)).from_world();
        ops.valid[t] = 1;
    }
    return ops;
}

double latitude(const Vec3 &d) { return std::atan2(-d.y(), std::hypot(d.x(), d.z())); }

Grid<double> latitude_map(const CameraModel &cam, const Pose &pose) {
    Grid<double> g(cam.width(), cam.height(), std::numeric_limits<double>::quiet_NaN());
    parallel::for_rows(cam.height(), [&](int row) {
        for (int col = 0; col < cam.width(); ++col) {
            const auto d = cam.try_unproject(pixel_center(col, row));
            if (!d) {
                continue;
            }
            const size_t i = g.index(row, col);
            g.data[i] = latitude(pose.rotation * *d);
            g.valid[i] = 1;
        }
    });
    return g;
}

std::optional<Vec2> up_vector_at(const CameraModel &cam, const Pose &pose, const PixelCoord &p, double delta) {
    if (!(delta > 0.0) || delta > 0.5) {
        throw DomainError("up-map delta must lie in (0, 0.5] rad");
    }
    const auto dc = cam.try_unproject(p);
    if (!dc) {
        return std::nullopt;
    }
    const Vec3 d = pose.rotation * *dc;
    const Vec3 k = d.cross(world_up());
    const double kn = k.norm();
    if (kn < kDegenerate) {
        return std::nullopt;
    }
    const Vec3 rotated = rodrigues(k / kn, delta, d);
    const Vec3 rotated_cam = pose.rotation.matrix().transpose() * rotated;
    if (!cam.in_model(rotated_cam)) {
        return std::nullopt;
    }
    const auto q = cam.try_project(rotated_cam);
    if (!q) {
        return std::nullopt;
    }
    double du = q->u - p.u;
    if (cam.is_erp()) {
        // Longitude wraps: take the short way around.
        du -= cam.width() * std::round(du / cam.width());
    }
    const Vec2 disp(du, q->v - p.v);
    const double n = disp.norm();
    if (!(n > 0.0)) {
        return std::nullopt;
    }
    return disp / n;
}

Grid<Vec2> up_map(const CameraModel &cam, const Pose &pose, double delta) {
    Grid<Vec2> g(cam.width(), cam.height(), Vec2::Constant(std::numeric_limits<double>::quiet_NaN()));
    parallel::for_rows(cam.height(), [&](int row) {
        for (int col = 0; col < cam.width(); ++col) {
            const auto up = up_vector_at(cam, pose, pixel_center(col, row), delta);
            if (!up) {
                continue;
            }
            const size_t i = g.index(row, col);
            g.data[i] = *up;
            g.valid[i] = 1;
        }
    });
    return g;
}

LatUpMap latup_map(const CameraModel &cam, const Pose &pose, double delta) {
    return {latitude_map(cam, pose), up_map(cam, pose, delta)};
}

LatUpRaster latup_raster(const CameraModel &cam, const Pose &pose, double delta) {
    const auto m = latup_map(cam, pose, delta);
    LatUpRaster out{Raster(cam.height(), cam.width(), 3, std::numeric_limits<float>::quiet_NaN()),
                    std::vector<std::uint8_t>(static_cast<size_t>(cam.width()) * cam.height(), 0)};
    for (int row = 0; row < cam.height(); ++row) {
        for (int col = 0; col < cam.width(); ++col) {
            const size_t i = m.lat.index(row, col);
            if (!m.lat.valid[i] || !m.up.valid[i]) {
                continue;
            }
            out.values.at(row, col, 0) = static_cast<float>(m.lat.data[i]);
            out.values.at(row, col, 1) = static_cast<float>(m.up.data[i].x());
            out.values.at(row, col, 2) = static_cast<float>(m.up.data[i].y());
            out.mask[i] = 1;
        }
    }
    return out;
}

std::vector<Vec3> latup_tokens(const std::vector<CameraModel> &cams, const std::vector<Pose> &poses,
                               const TokenGrid &grid, double delta) {
    std::vector<Vec3> out(grid.size(), Vec3::Zero());
    for (size_t t = 0; t < grid.size(); ++t) {
        const auto &tok = grid.tokens[t];
        const auto &cam = cams.at(tok.camera);
        const auto &pose = poses.at(tok.camera);
        const auto d = cam.try_unproject(tok.pixel);
        const auto up = up_vector_at(cam, pose, tok.pixel, delta);
        if (d && up) {
            out[t] = Vec3(latitude(pose.rotation * *d), up->x(), up->y());
        }
    }
    return out;
}

std::vector<double> rope_angles(double row, double col, int rope_dim, double base) {
    if (rope_dim < 0 || rope_dim % 4 != 0) {
        throw InputError("RoPE dimension must be a non-negative multiple of 4");
    }
    const int axis_dim = rope_dim / 2;
    const int pairs = axis_dim / 2;
    std::vector<double> angles(static_cast<size_t>(rope_dim / 2));
    for (int j = 0; j < pairs; ++j) {
        const double theta = std::pow(base, -2.0 * j / axis_dim);
        angles[j] = row * theta;
        angles[pairs + j] = col * theta;
    }
    return angles;
}

std::string to_string(EncodingKind kind) {
    switch (kind) {
        case EncodingKind::none:
            return "none";
        case EncodingKind::cape:
            return "cape";
        case EncodingKind::gta:
            return "gta";
        case EncodingKind::prope:
            return "prope";
        case EncodingKind::ucpe_ray:
            return "ucpe_ray";
        case EncodingKind::ucpe_hybrid:
            return "ucpe_hybrid";
    }
    return "unknown";
}

EncodingKind encoding_kind_from_string(const std::string &s) {
    for (auto k : {EncodingKind::none, EncodingKind::cape, EncodingKind::gta, EncodingKind::prope,
                   EncodingKind::ucpe_ray, EncodingKind::ucpe_hybrid}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw InputError("unknown encoding kind '" + s + "'");
}

TokenOperator TokenOperator::identity(int head_dim) {
    TokenOperator op;
    op.ray_dims = head_dim;
    return op;
}

Eigen::MatrixXd TokenOperator::dense() const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(head_dim(), head_dim());
    for (int b = 0; b + 4 <= ray_dims; b += 4) {
        D.block<4, 4>(b, b) = ray_block;
    }
    for (size_t j = 0; j < rope_angles.size(); ++j) {
        const int o = ray_dims + 2 * static_cast<int>(j);
        const double c = std::cos(rope_angles[j]), s = std::sin(rope_angles[j]);
        D(o, o) = c;
        D(o, o + 1) = -s;
        D(o + 1, o) = s;
        D(o + 1, o + 1) = c;
    }
    return D;
}

std::pair<int, int> operator_layout(EncodingKind kind, const OperatorOptions &opts) {
    const int d = opts.head_dim;
    if (d < 1) {
        throw InputError("head dimension must be positive");
    }
    if (kind == EncodingKind::none) {
        return {d, 0};
    }
    const bool hybrid = kind == EncodingKind::ucpe_hybrid ||
                        (opts.hybrid_rope && kind != EncodingKind::ucpe_ray && kind != EncodingKind::none);
    if (hybrid) {
        if (d % 8 != 0) {
            throw InputError("hybrid encodings need a head dimension divisible by 8, got " + std::to_string(d));
        }
        return {d / 2, d / 2};
    }
    if (d % 4 != 0) {
        throw InputError("ray encodings need a head dimension divisible by 4, got " + std::to_string(d));
    }
    return {d, 0};
}

TokenOperator build_operator(EncodingKind kind, const CameraModel &cam, const Pose &pose, const TokenRef &token,
                             const OperatorOptions &opts) {
    TokenOperator op;
    std::tie(op.ray_dims, op.rope_dims) = operator_layout(kind, opts);
    switch (kind) {
        case EncodingKind::none:
            return op;
        case EncodingKind::cape:
        case EncodingKind::gta:
            op.ray_block = pose.inverse().matrix();
            op.ray_block_inverse = pose.matrix();
            break;
        case EncodingKind::prope: {
            if (!opts.intrinsics && !cam.is_pinhole()) {
                throw UnsupportedModelError("projective encoding supports pinhole cameras only (got " +
                                            to_string(cam.kind()) + " with xi=" + std::to_string(cam.xi()) + ")");
            }
            Mat4 Kh = Mat4::Identity();
            Kh.topLeftCorner<3, 3>() = opts.intrinsics ? *opts.intrinsics : cam.intrinsics();
            op.ray_block = Kh * pose.inverse().matrix();
            op.ray_block_inverse = op.ray_block.inverse();
            break;
        }
        case EncodingKind::ucpe_ray:
        case EncodingKind::ucpe_hybrid: {
            const auto d = cam.try_unproject(token.pixel);
            if (!d) {
                throw DomainError("token pixel lies outside the camera model");
            }
            const auto frame = ray_frame({pose.translation, pose.rotation * *d}, camera_down(pose), camera_right(pose));
            op.ray_block_inverse = frame.to_world();
            op.ray_block = se3_inverse(op.ray_block_inverse);
            break;
        }
    }
    if (op.rope_dims > 0) {
        op.rope_angles = rope_angles(token.row, token.col, op.rope_dims, opts.rope_base);
    }
    return op;
}

std::vector<TokenOperator> build_operators(EncodingKind kind, const std::vector<CameraModel> &cams,
                                           const std::vector<Pose> &poses, const TokenGrid &grid,
                                           const OperatorOptions &opts) {
    if (cams.size() != poses.size()) {
        throw InputError("camera and pose counts differ");
    }
    std::vector<TokenOperator> ops;
    ops.reserve(grid.size());
    for (const auto &tok : grid.tokens) {
        ops.push_back(build_operator(kind, cams.at(tok.camera), poses.at(tok.camera), tok, opts));
    }
    return ops;
}

}  // namespace camray
