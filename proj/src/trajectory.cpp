#include "camray/trajectory.hpp"

#include <string>

namespace camray {

void Trajectory::validate() const {
    for (size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].index <= frames[i - 1].index) {
            throw InputError("trajectory frame indices must be strictly increasing (frame " + std::to_string(i) + ")");
        }
    }
}

std::vector<Pose> Trajectory::poses() const {
    std::vector<Pose> out;
    out.reserve(frames.size());
    for (const auto &f : frames) {
        out.push_back(f.pose);
    }
    return out;
}

std::vector<Vec3> Trajectory::centers() const {
    std::vector<Vec3> out;
    out.reserve(frames.size());
    for (const auto &f : frames) {
        out.push_back(f.pose.translation);
    }
    return out;
}

Trajectory Trajectory::from_poses(const std::vector<Pose> &poses) {
    Trajectory t;
    t.frames.reserve(poses.size());
    for (size_t i = 0; i < poses.size(); ++i) {
        t.frames.push_back({static_cast<int>(i), poses[i], std::nullopt, std::nullopt});
    }
    return t;
}

}  // namespace camray
