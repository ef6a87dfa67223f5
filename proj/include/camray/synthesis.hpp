#pragma once

#include "camray/cameras.hpp"
#include "camray/geometry.hpp"
#include "camray/raster.hpp"
#include "camray/rng.hpp"
#include "camray/trajectory.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace camray {

enum class LensCategory { pinhole, wide, fisheye, extreme };

struct LensRange {
    double xfov_min_deg;
    double xfov_max_deg;
    double xi_min;
    double xi_max;
};

std::string to_string(LensCategory c);
LensCategory lens_category_from_string(const std::string &s);
const LensRange &lens_range(LensCategory c);
inline constexpr std::array<LensCategory, 4> kAllLensCategories = {LensCategory::pinhole, LensCategory::wide,
                                                                    LensCategory::fisheye, LensCategory::extreme};

/// Draws xfov then xi uniformly inside the category's intervals. The pinhole category
/// yields a pinhole camera.
CameraModel sample_camera(LensCategory c, SplitMix64 &rng, int width = 832, int height = 480);

enum class AugmentationMode { none, yaw, yaw_pitch, pan };

std::string to_string(AugmentationMode m);
AugmentationMode augmentation_mode_from_string(const std::string &s);

/// Half-widths of the sampling intervals, in degrees.
struct AugmentRanges {
    double yaw_deg = 180.0;
    double pitch_deg = 80.0;
    double pan_yaw_deg = 90.0;
    double pan_pitch_deg = 40.0;
    double pan_roll_deg = 30.0;
};

/// Yaw/pitch/roll offset in degrees, applied as yaw · pitch · roll in the world frame.
struct EulerOffset {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

Rotation3 offset_rotation(const EulerOffset &o);

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

/// Per-frame offsets. yaw and yaw_pitch draw one offset for the whole clip; pan draws a start
/// and an end offset (yaw, pitch, roll each) and blends them with smoothstep over the frames.
std::vector<EulerOffset> augment_offsets(size_t frames, AugmentationMode mode, SplitMix64 &rng,
                                         const AugmentRanges &ranges = {});

/// out_i = offset_rotation(offset_i) · base_i.
std::vector<Rotation3> augment_rotations(const std::vector<Rotation3> &base, AugmentationMode mode, SplitMix64 &rng,
                                         const AugmentRanges &ranges = {});

std::vector<Rotation3> apply_offsets(const std::vector<Rotation3> &base, const std::vector<EulerOffset> &offsets);

/// Keeps the panorama translation and replaces the orientation with R_erp · R_aug.
Pose compose_virtual_pose(const Pose &erp_pose, const Rotation3 &r_aug);

/// Normalized panorama coordinates (u', v') in [0, 1)² of a direction in the panorama frame.
Vec2 erp_coordinates(const Vec3 &direction);

struct RenderedView {
    Raster image;
    std::vector<std::uint8_t> mask;
};

/// Renders a virtual camera view of an equirectangular frame: per pixel, unproject through
/// `cam`, rotate by r_aug, look up the panorama with bilinear filtering (longitude wraps,
/// latitude clamps). Pixels outside the lens model are 0 with mask 0.
RenderedView render_view(const Raster &erp, const CameraModel &cam, const Rotation3 &r_aug);

/// Linear-interpolation percentile (p in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double p);
double median(std::vector<double> values);

/// Scale statistic: median over frames of the 25th percentile of each frame's valid depths
/// (finite and > 0). Frames without valid depths are skipped; none at all throws DomainError.
double near_plane_scale(const std::vector<Raster> &depths);

/// Divides all translations by near_plane_scale(depths); rotations are untouched.
Trajectory normalize_scale(const Trajectory &traj, const std::vector<Raster> &depths);

}  // namespace camray
