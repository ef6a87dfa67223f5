#pragma once

#include "camray/cameras.hpp"
#include "camray/geometry.hpp"

#include <optional>
#include <vector>

namespace camray {

struct TrajectoryFrame {
    int index = 0;
    /// Camera-to-world pose T^wc.
    Pose pose;
    std::optional<double> timestamp;
    std::optional<CameraModel> camera;
};

struct Trajectory {
    std::vector<TrajectoryFrame> frames;

    size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    /// Throws InputError unless indices are strictly increasing.
    void validate() const;

    std::vector<Pose> poses() const;
    std::vector<Vec3> centers() const;
    static Trajectory from_poses(const std::vector<Pose> &poses);
};

}  // namespace camray
