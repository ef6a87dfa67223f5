#pragma once

#include "camray/cameras.hpp"
#include "camray/geometry.hpp"
#include "camray/raster.hpp"
#include "camray/trajectory.hpp"

#include <span>
#include <vector>

namespace camray {

/// T_i = (T_0)⁻¹ T_i for every frame.
std::vector<Pose> relative_trajectory(const Trajectory &traj);

/// round(i·(N−1)/(n−1)) for i in [0, n).
std::vector<size_t> subsample_indices(size_t frame_count, size_t samples);

struct PoseMetrics {
    double rot_err_deg = 0.0;
    double trans_err = 0.0;
    double cam_mc = 0.0;
};

/// Summed relative-pose errors over `samples` uniformly spaced frames of each trajectory.
/// Trajectories may have different lengths; each is subsampled on its own index range.
PoseMetrics pose_metrics(const Trajectory &gt, const Trajectory &pred, size_t samples = 16);

/// Largest rotation between the first frame and any later frame, in degrees.
double rotation_score(const Trajectory &traj);

/// dst ≈ scale · R_yaw(yaw) · src + translation, R_yaw a rotation about the vertical axis.
struct YawAlignment {
    double scale = 1.0;
    double yaw = 0.0;  // radians
    Vec3 translation = Vec3::Zero();
    double rmse = 0.0;

    Vec3 apply(const Vec3 &p) const;
};

/// Least-squares similarity restricted to vertical-axis rotation. With centered points x̃, ỹ:
///   A = Σ ỹx x̃x + ỹz x̃z,  B = Σ ỹx x̃z − ỹz x̃x,  yaw = atan2(B, A)
///   scale = (√(A² + B²) + Σ ỹy x̃y) / Σ‖x̃‖²,  t = ȳ − scale · R_yaw x̄.
/// Throws DomainError for degenerate source sets or a non-positive optimal scale.
YawAlignment align_yaw_umeyama(std::span<const Vec3> src, std::span<const Vec3> dst);

double alignment_rmse(std::span<const Vec3> src, std::span<const Vec3> dst, double scale, double yaw,
                      const Vec3 &translation);

struct CalibEstimate {
    std::vector<double> pitch_deg;
    std::vector<double> roll_deg;
    double fov_deg = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
};

struct CalibErrors {
    std::vector<double> pitch_deg;
    std::vector<double> roll_deg;
    double pitch_mean_deg = 0.0;
    double roll_mean_deg = 0.0;
    double pitch_sum_deg = 0.0;
    double roll_sum_deg = 0.0;
    double fov_deg = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Wraps an angle difference into [−180, 180).
double wrap_degrees(double deg);

CalibErrors calib_errors(const CalibEstimate &gt, const CalibEstimate &pred);

struct PitchRoll {
    double pitch_deg;
    double roll_deg;
};

/// Gravity-aligned pitch/roll of a camera-to-world rotation: pitch = asin of the forward
/// axis's upward component, roll = atan2 of the right and down axes' vertical components.
/// Inverts R = yaw · pitch · roll for |pitch| < 90°.
PitchRoll pitch_roll_from_rotation(const Rotation3 &R);

struct RectifiedFrames {
    CameraModel camera;
    std::vector<Raster> frames;
    /// Valid where the source ray is in model and the source pixel falls inside the image.
    std::vector<std::uint8_t> mask;
};

/// Resamples every frame to a pinhole camera with the field of view capped at `cap_deg`.
RectifiedFrames prep_rectified(const std::vector<Raster> &frames, const CameraModel &cam, double cap_deg = 100.0);

}  // namespace camray
