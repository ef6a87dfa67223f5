#include "camray/metrics.hpp"

#include "camray/image.hpp"
#include "camray/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace camray {

std::vector<Pose> relative_trajectory(const Trajectory &traj) {
    if (traj.empty()) {
        throw InputError("relative trajectory of an empty trajectory");
    }
    const Pose first_inv = traj.frames.front().pose.inverse();
    std::vector<Pose> out;
    out.reserve(traj.size());
    for (const auto &f : traj.frames) {
        out.push_back(first_inv * f.pose);
    }
    out.front() = Pose::identity();
    return out;
}

std::vector<size_t> subsample_indices(size_t frame_count, size_t samples) {
    if (frame_count == 0 || samples < 2) {
        throw InputError("subsampling needs frames and at least two samples");
    }
    std::vector<size_t> idx(samples);
    for (size_t i = 0; i < samples; ++i) {
        idx[i] = static_cast<size_t>(std::llround(static_cast<double>(i) * (frame_count - 1) / (samples - 1)));
    }
    return idx;
}

namespace {

Eigen::Matrix<double, 12, 1> flatten_top_rows(const Pose &p) {
    const Mat4 T = p.matrix();
    Eigen::Matrix<double, 12, 1> v;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) {
            v[4 * r + c] = T(r, c);
        }
    }
    return v;
}

}  // namespace

PoseMetrics pose_metrics(const Trajectory &gt, const Trajectory &pred, size_t samples) {
    if (gt.size() < 2 || pred.size() < 2) {
        throw InputError("pose metrics need at least two frames per trajectory");
    }
    const auto rel_gt = relative_trajectory(gt);
    const auto rel_pred = relative_trajectory(pred);
    const auto idx_gt = subsample_indices(gt.size(), samples);
    const auto idx_pred = subsample_indices(pred.size(), samples);
    PoseMetrics m;
    for (size_t i = 0; i < samples; ++i) {
        const Pose &a = rel_gt[idx_gt[i]];
        const Pose &b = rel_pred[idx_pred[i]];
        m.rot_err_deg += rad2deg(rotation_angle(a.rotation, b.rotation));
        m.trans_err += (a.translation - b.translation).norm();
        m.cam_mc += (flatten_top_rows(a) - flatten_top_rows(b)).norm();
    }
    return m;
}

double rotation_score(const Trajectory &traj) {
    if (traj.size() < 2) {
        throw InputError("rotation score needs at least two frames");
    }
    double best = 0.0;
    for (size_t i = 1; i < traj.size(); ++i) {
        best = std::max(best, rotation_angle(traj.frames[0].pose.rotation, traj.frames[i].pose.rotation));
    }
    return rad2deg(best);
}

Vec3 YawAlignment::apply(const Vec3 &p) const { return scale * (yaw_rotation(yaw) * p) + translation; }

double alignment_rmse(std::span<const Vec3> src, std::span<const Vec3> dst, double scale, double yaw,
                      const Vec3 &translation) {
    const Mat3 R = yaw_rotation(yaw).matrix();
    double sq = 0.0;
    for (size_t i = 0; i < src.size(); ++i) {
        sq += (dst[i] - (scale * (R * src[i]) + translation)).squaredNorm();
    }
    return std::sqrt(sq / static_cast<double>(src.size()));
}

YawAlignment align_yaw_umeyama(std::span<const Vec3> src, std::span<const Vec3> dst) {
    if (src.size() != dst.size() || src.size() < 2) {
        throw InputError("alignment needs two equally long point sets with at least two points");
    }
    const double n = static_cast<double>(src.size());
    Vec3 mx = Vec3::Zero(), my = Vec3::Zero();
    for (size_t i = 0; i < src.size(); ++i) {
        mx += src[i];
        my += dst[i];
    }
    mx /= n;
    my /= n;
    double A = 0.0, B = 0.0, C = 0.0, var = 0.0;
    for (size_t i = 0; i < src.size(); ++i) {
        const Vec3 x = src[i] - mx, y = dst[i] - my;
        A += y.x() * x.x() + y.z() * x.z();
        B += y.x() * x.z() - y.z() * x.x();
        C += y.y() * x.y();
        var += x.squaredNorm();
    }
    if (var <= 1e-300 || var / n < 1e-24 * std::max(1.0, mx.squaredNorm())) {
        throw DomainError("source points are degenerate; scale is undefined");
    }
    YawAlignment a;
    a.yaw = std::atan2(B, A);
    a.scale = (std::hypot(A, B) + C) / var;
    if (!(a.scale > 0.0)) {
        throw DomainError("optimal scale is not positive");
    }
    a.translation = my - a.scale * (yaw_rotation(a.yaw) * mx);
    a.rmse = alignment_rmse(src, dst, a.scale, a.yaw, a.translation);
    return a;
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0.0) {
        w += 360.0;
    }
    return w - 180.0;
}

CalibErrors calib_errors(const CalibEstimate &gt, const CalibEstimate &pred) {
    if (gt.pitch_deg.size() != pred.pitch_deg.size() || gt.roll_deg.size() != pred.roll_deg.size()) {
        throw InputError("calibration estimates have different frame counts");
    }
    CalibErrors e;
    for (size_t i = 0; i < gt.pitch_deg.size(); ++i) {
        e.pitch_deg.push_back(std::abs(wrap_degrees(pred.pitch_deg[i] - gt.pitch_deg[i])));
    }
    for (size_t i = 0; i < gt.roll_deg.size(); ++i) {
        e.roll_deg.push_back(std::abs(wrap_degrees(pred.roll_deg[i] - gt.roll_deg[i])));
    }
    e.pitch_sum_deg = std::accumulate(e.pitch_deg.begin(), e.pitch_deg.end(), 0.0);
    e.roll_sum_deg = std::accumulate(e.roll_deg.begin(), e.roll_deg.end(), 0.0);
    e.pitch_mean_deg = e.pitch_deg.empty() ? 0.0 : e.pitch_sum_deg / e.pitch_deg.size();
    e.roll_mean_deg = e.roll_deg.empty() ? 0.0 : e.roll_sum_deg / e.roll_deg.size();
    e.fov_deg = std::abs(wrap_degrees(pred.fov_deg - gt.fov_deg));
    e.k1 = std::abs(pred.k1 - gt.k1);
    e.k2 = std::abs(pred.k2 - gt.k2);
    return e;
}

PitchRoll pitch_roll_from_rotation(const Rotation3 &R) {
    const Mat3 &m = R.matrix();
    const Vec3 right = m.col(0), down = m.col(1), forward = m.col(2);
    const double pitch = std::asin(std::clamp(-forward.y(), -1.0, 1.0));
    const double roll = std::atan2(right.y(), down.y());
    return {rad2deg(pitch), rad2deg(roll)};
}

RectifiedFrames prep_rectified(const std::vector<Raster> &frames, const CameraModel &cam, double cap_deg) {
    const auto map = rectify_map(cam, cap_deg);
    RectifiedFrames out{map.dst, {}, std::vector<std::uint8_t>(map.src_pixels.valid.size(), 0)};
    for (size_t i = 0; i < out.mask.size(); ++i) {
        if (!map.src_pixels.valid[i]) {
            continue;
        }
        const Vec2 &p = map.src_pixels.data[i];
        out.mask[i] = p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= cam.width() && p.y() <= cam.height();
    }
    for (const auto &f : frames) {
        if (f.width != static_cast<std::uint32_t>(cam.width()) || f.height != static_cast<std::uint32_t>(cam.height())) {
            throw InputError("frame size does not match the camera");
        }
        Raster r(f.height, f.width, f.channels);
        parallel::for_rows(static_cast<int>(f.height), [&](int row) {
            for (int col = 0; col < static_cast<int>(f.width); ++col) {
                const size_t i = static_cast<size_t>(row) * f.width + col;
                if (!out.mask[i]) {
                    continue;
                }
                const Vec2 &p = map.src_pixels.data[i];
                sample_clamped(f, p.x() - 0.5, p.y() - 0.5, &r.data[i * f.channels]);
            }
        });
        out.frames.push_back(std::move(r));
    }
    return out;
}

}  // namespace camray
