#pragma once

#include "camray/attention.hpp"
#include "camray/cameras.hpp"
#include "camray/metrics.hpp"
#include "camray/trajectory.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace camray {

using json = nlohmann::ordered_json;

/// Parses a JSON file; throws InputError naming the path on I/O or syntax errors.
json read_json(const std::filesystem::path &path);
void write_json(const std::filesystem::path &path, const json &j);
/// Compact-free, stable text form used for every emitted file.
std::string dump_json(const json &j);

// {"model": "ucm"|"pinhole"|"erp", "xfov_deg": x, "xi": x, "width": n, "height": n}
json camera_to_json(const CameraModel &cam);
CameraModel camera_from_json(const json &j);

/// 16 floats, row-major 4x4.
json pose_to_json(const Pose &p);
Pose pose_from_json(const json &j);

// {"frames": [{"i": n, "T_wc": [16 floats]}]}
json trajectory_to_json(const Trajectory &t);
Trajectory trajectory_from_json(const json &j);

// {"pitch_deg": [...], "roll_deg": [...], "fov_deg": x, "k1": x, "k2": x}
json calib_to_json(const CalibEstimate &c);
CalibEstimate calib_from_json(const json &j);

json pose_metrics_to_json(const PoseMetrics &m);
json calib_errors_to_json(const CalibErrors &e);
json alignment_to_json(const YawAlignment &a);

// {"model_dim", "heads", "kind", "hybrid_rope", "adapter": {"compression", "heads", "placement", "latup_bias"}}
json attention_config_to_json(const AttentionConfig &c);
AttentionConfig attention_config_from_json(const json &j);

/// One CRAYRAST file per tensor plus manifest.json listing {"name", "file", "rows", "cols"}.
void save_weights(const std::filesystem::path &dir, const WeightSet &w);
WeightSet load_weights(const std::filesystem::path &dir);

}  // namespace camray
