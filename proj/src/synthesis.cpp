#include "camray/synthesis.hpp"

#include "camray/image.hpp"
#include "camray/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace camray {

std::string to_string(LensCategory c) {
    switch (c) {
        case LensCategory::pinhole:
            return "pinhole";
        case LensCategory::wide:
            return "wide";
        case LensCategory::fisheye:
            return "fisheye";
        case LensCategory::extreme:
            return "extreme";
    }
    return "unknown";
}

LensCategory lens_category_from_string(const std::string &s) {
    for (auto c : kAllLensCategories) {
        if (to_string(c) == s) {
            return c;
        }
    }
    throw InputError("unknown lens category '" + s + "' (expected pinhole, wide, fisheye or extreme)");
}

const LensRange &lens_range(LensCategory c) {
    static const LensRange ranges[] = {
        {90.0, 110.0, 0.0, 0.0},
        {110.0, 140.0, 0.5, 0.95},
        {140.0, 180.0, 1.05, 2.0},
        {160.0, 200.0, 1.5, 2.3},
    };
    return ranges[static_cast<int>(c)];
}

CameraModel sample_camera(LensCategory c, SplitMix64 &rng, int width, int height) {
    const auto &r = lens_range(c);
    const double xfov = rng.uniform(r.xfov_min_deg, r.xfov_max_deg);
    const double xi = rng.uniform(r.xi_min, r.xi_max);
    if (c == LensCategory::pinhole) {
        return CameraModel::pinhole(xfov, width, height);
    }
    return CameraModel::ucm(xfov, xi, width, height);
}

std::string to_string(AugmentationMode m) {
    switch (m) {
        case AugmentationMode::none:
            return "none";
        case AugmentationMode::yaw:
            return "yaw";
        case AugmentationMode::yaw_pitch:
            return "yaw_pitch";
        case AugmentationMode::pan:
            return "pan";
    }
    return "unknown";
}

AugmentationMode augmentation_mode_from_string(const std::string &s) {
    for (auto m : {AugmentationMode::none, AugmentationMode::yaw, AugmentationMode::yaw_pitch, AugmentationMode::pan}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw InputError("unknown augmentation mode '" + s + "' (expected none, yaw, yaw_pitch or pan)");
}

Rotation3 offset_rotation(const EulerOffset &o) {
    return yaw_rotation(deg2rad(o.yaw_deg)) * pitch_rotation(deg2rad(o.pitch_deg)) *
           roll_rotation(deg2rad(o.roll_deg));
}

std::vector<EulerOffset> augment_offsets(size_t frames, AugmentationMode mode, SplitMix64 &rng,
                                         const AugmentRanges &ranges) {
    if (frames == 0) {
        throw InputError("augmentation needs at least one frame");
    }
    auto symmetric = [&rng](double half) { return rng.uniform(-half, half); };
    std::vector<EulerOffset> out(frames);
    switch (mode) {
        case AugmentationMode::none:
            break;
        case AugmentationMode::yaw: {
            const EulerOffset o{symmetric(ranges.yaw_deg), 0.0, 0.0};
            std::fill(out.begin(), out.end(), o);
            break;
        }
        case AugmentationMode::yaw_pitch: {
            EulerOffset o;
            o.yaw_deg = symmetric(ranges.yaw_deg);
            o.pitch_deg = symmetric(ranges.pitch_deg);
            std::fill(out.begin(), out.end(), o);
            break;
        }
        case AugmentationMode::pan: {
            EulerOffset start, end;
            start.yaw_deg = symmetric(ranges.pan_yaw_deg);
            start.pitch_deg = symmetric(ranges.pan_pitch_deg);
            start.roll_deg = symmetric(ranges.pan_roll_deg);
            end.yaw_deg = symmetric(ranges.pan_yaw_deg);
            end.pitch_deg = symmetric(ranges.pan_pitch_deg);
            end.roll_deg = symmetric(ranges.pan_roll_deg);
            for (size_t i = 0; i < frames; ++i) {
                const double s = frames == 1 ? 0.0 : smoothstep(static_cast<double>(i) / (frames - 1));
                out[i].yaw_deg = start.yaw_deg + (end.yaw_deg - start.yaw_deg) * s;
                out[i].pitch_deg = start.pitch_deg + (end.pitch_deg - start.pitch_deg) * s;
                out[i].roll_deg = start.roll_deg + (end.roll_deg - start.roll_deg) * s;
            }
            // Exact endpoints regardless of rounding in the blend.
            out.front() = start;
            if (frames > 1) {
                out.back() = end;
            }
            break;
        }
    }
    return out;
}

std::vector<Rotation3> apply_offsets(const std::vector<Rotation3> &base, const std::vector<EulerOffset> &offsets) {
    if (base.size() != offsets.size()) {
        throw InputError("offset count does not match frame count");
    }
    std::vector<Rotation3> out;
    out.reserve(base.size());
    for (size_t i = 0; i < base.size(); ++i) {
        out.push_back(offset_rotation(offsets[i]) * base[i]);
    }
    return out;
}

std::vector<Rotation3> augment_rotations(const std::vector<Rotation3> &base, AugmentationMode mode, SplitMix64 &rng,
                                         const AugmentRanges &ranges) {
    return apply_offsets(base, augment_offsets(base.size(), mode, rng, ranges));
}

Pose compose_virtual_pose(const Pose &erp_pose, const Rotation3 &r_aug) {
    return {erp_pose.rotation * r_aug, erp_pose.translation};
}

Vec2 erp_coordinates(const Vec3 &d) {
    const Vec3 n = d.normalized();
    double u = (std::atan2(n.x(), n.z()) + M_PI) / (2.0 * M_PI);
    u -= std::floor(u);
    const double v = (std::asin(std::clamp(n.y(), -1.0, 1.0)) + 0.5 * M_PI) / M_PI;
    return {u, v};
}

RenderedView render_view(const Raster &erp, const CameraModel &cam, const Rotation3 &r_aug) {
    if (erp.width == 0 || erp.height == 0 || erp.channels == 0) {
        throw InputError("equirectangular frame is empty");
    }
    RenderedView out{Raster(cam.height(), cam.width(), erp.channels),
                     std::vector<std::uint8_t>(static_cast<size_t>(cam.width()) * cam.height(), 0)};
    const Mat3 R = r_aug.matrix();
    parallel::for_rows(cam.height(), [&](int row) {
        for (int col = 0; col < cam.width(); ++col) {
            const auto d = cam.try_unproject(pixel_center(col, row));
            if (!d) {
                continue;
            }
            const Vec2 uv = erp_coordinates(R * *d);
            const size_t i = static_cast<size_t>(row) * cam.width() + col;
            sample_wrap_x(erp, uv.x() * erp.width - 0.5, uv.y() * erp.height - 0.5, &out.image.data[i * erp.channels]);
            out.mask[i] = 1;
        }
    });
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw DomainError("percentile of an empty set");
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * (values.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - lo);
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

double near_plane_scale(const std::vector<Raster> &depths) {
    std::vector<double> per_frame;
    for (const auto &d : depths) {
        std::vector<double> valid;
        valid.reserve(d.data.size());
        for (float v : d.data) {
            if (std::isfinite(v) && v > 0.0f) {
                valid.push_back(v);
            }
        }
        if (!valid.empty()) {
            per_frame.push_back(percentile(std::move(valid), 25.0));
        }
    }
    if (per_frame.empty()) {
        throw DomainError("no valid depths for scale normalization");
    }
    return median(std::move(per_frame));
}

Trajectory normalize_scale(const Trajectory &traj, const std::vector<Raster> &depths) {
    const double s = near_plane_scale(depths);
    Trajectory out = traj;
    for (auto &f : out.frames) {
        f.pose.translation /= s;
    }
    return out;
}

}  // namespace camray
