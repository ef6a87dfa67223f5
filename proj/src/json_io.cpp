#include "camray/json_io.hpp"

#include "camray/raster.hpp"

#include <algorithm>
#include <fstream>
#include <utility>

namespace camray {

json read_json(const std::filesystem::path &path) {
    std::ifstream f(path);
    if (!f) {
        throw InputError("cannot open " + path.string());
    }
    try {
        return json::parse(f);
    } catch (const json::exception &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string dump_json(const json &j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path &path, const json &j) {
    std::ofstream f(path);
    if (!f) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    f << dump_json(j);
}

namespace {

template <typename T>
T field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw InputError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json &j, const char *key, T fallback) {
    return j.is_object() && j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace

json camera_to_json(const CameraModel &cam) {
    json j;
    j["model"] = to_string(cam.kind());
    if (!cam.is_erp()) {
        j["xfov_deg"] = cam.xfov_deg();
        j["xi"] = cam.xi();
    }
    j["width"] = cam.width();
    j["height"] = cam.height();
    return j;
}

CameraModel camera_from_json(const json &j) {
    const auto model = field<std::string>(j, "model");
    const int w = field<int>(j, "width");
    const int h = field<int>(j, "height");
    if (model == "erp") {
        return CameraModel::erp(w, h);
    }
    const double xfov = field<double>(j, "xfov_deg");
    if (model == "pinhole") {
        return CameraModel::pinhole(xfov, w, h);
    }
    if (model == "ucm") {
        return CameraModel::ucm(xfov, field_or<double>(j, "xi", 0.0), w, h);
    }
    throw InputError("unknown camera model '" + model + "'");
}

json pose_to_json(const Pose &p) {
    const Mat4 T = p.matrix();
    json a = json::array();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            a.push_back(T(r, c));
        }
    }
    return a;
}

Pose pose_from_json(const json &j) {
    const json &a = j.is_object() ? j.at("T_wc") : j;
    if (!a.is_array() || a.size() != 16) {
        throw InputError("pose must be 16 numbers (row-major 4x4)");
    }
    Mat4 T;
    for (int i = 0; i < 16; ++i) {
        if (!a[i].is_number()) {
            throw InputError("pose entries must be numbers");
        }
        T(i / 4, i % 4) = a[i].get<double>();
    }
    return Pose::from_matrix(T);
}

json trajectory_to_json(const Trajectory &t) {
    json frames = json::array();
    for (const auto &f : t.frames) {
        json jf;
        jf["i"] = f.index;
        jf["T_wc"] = pose_to_json(f.pose);
        if (f.timestamp) {
            jf["t"] = *f.timestamp;
        }
        if (f.camera) {
            jf["camera"] = camera_to_json(*f.camera);
        }
        frames.push_back(std::move(jf));
    }
    json j;
    j["frames"] = std::move(frames);
    return j;
}

Trajectory trajectory_from_json(const json &j) {
    if (!j.is_object() || !j.contains("frames") || !j.at("frames").is_array()) {
        throw InputError("trajectory JSON needs a 'frames' array");
    }
    Trajectory t;
    size_t k = 0;
    for (const auto &jf : j.at("frames")) {
        TrajectoryFrame f;
        try {
            f.index = field_or<int>(jf, "i", static_cast<int>(k));
            f.pose = pose_from_json(jf.at("T_wc"));
            if (jf.contains("t")) {
                f.timestamp = field<double>(jf, "t");
            }
            if (jf.contains("camera")) {
                f.camera = camera_from_json(jf.at("camera"));
            }
        } catch (const json::exception &e) {
            throw InputError("trajectory frame " + std::to_string(k) + ": " + e.what());
        } catch (const std::runtime_error &e) {
            throw InputError("trajectory frame " + std::to_string(k) + ": " + e.what());
        }
        t.frames.push_back(std::move(f));
        ++k;
    }
    t.validate();
    return t;
}

json calib_to_json(const CalibEstimate &c) {
    json j;
    j["pitch_deg"] = c.pitch_deg;
    j["roll_deg"] = c.roll_deg;
    j["fov_deg"] = c.fov_deg;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    return j;
}

CalibEstimate calib_from_json(const json &j) {
    CalibEstimate c;
    c.pitch_deg = field<std::vector<double>>(j, "pitch_deg");
    c.roll_deg = field<std::vector<double>>(j, "roll_deg");
    c.fov_deg = field<double>(j, "fov_deg");
    c.k1 = field<double>(j, "k1");
    c.k2 = field<double>(j, "k2");
    return c;
}

json pose_metrics_to_json(const PoseMetrics &m) {
    json j;
    j["rot_err_deg"] = m.rot_err_deg;
    j["trans_err"] = m.trans_err;
    j["cam_mc"] = m.cam_mc;
    return j;
}

json calib_errors_to_json(const CalibErrors &e) {
    json j;
    j["pitch_err_deg"] = e.pitch_mean_deg;
    j["roll_err_deg"] = e.roll_mean_deg;
    j["pitch_err_sum_deg"] = e.pitch_sum_deg;
    j["roll_err_sum_deg"] = e.roll_sum_deg;
    j["fov_err_deg"] = e.fov_deg;
    j["k1_err"] = e.k1;
    j["k2_err"] = e.k2;
    return j;
}

json alignment_to_json(const YawAlignment &a) {
    json j;
    j["scale"] = a.scale;
    j["yaw_deg"] = rad2deg(a.yaw);
    j["translation"] = {a.translation.x(), a.translation.y(), a.translation.z()};
    j["rmse"] = a.rmse;
    return j;
}

json attention_config_to_json(const AttentionConfig &c) {
    json j;
    j["model_dim"] = c.model_dim;
    j["heads"] = c.heads;
    j["kind"] = to_string(c.kind);
    j["hybrid_rope"] = c.hybrid_rope;
    j["adapter"] = {{"compression", c.adapter.compression},
                    {"heads", c.adapter.heads},
                    {"placement", to_string(c.adapter.placement)},
                    {"latup_bias", c.adapter.latup_bias}};
    return j;
}

AttentionConfig attention_config_from_json(const json &j) {
    AttentionConfig c;
    c.model_dim = field_or<int>(j, "model_dim", c.model_dim);
    c.heads = field_or<int>(j, "heads", c.heads);
    c.kind = encoding_kind_from_string(field_or<std::string>(j, "kind", to_string(c.kind)));
    c.hybrid_rope = field_or<bool>(j, "hybrid_rope", c.hybrid_rope);
    if (j.contains("adapter")) {
        const auto &a = j.at("adapter");
        c.adapter.compression = field_or<int>(a, "compression", c.adapter.compression);
        c.adapter.heads = field_or<int>(a, "heads", c.adapter.heads);
        c.adapter.placement = placement_from_string(field_or<std::string>(a, "placement", "parallel"));
        c.adapter.latup_bias = field_or<bool>(a, "latup_bias", c.adapter.latup_bias);
    }
    c.validate();
    return c;
}

namespace {

Raster matrix_to_raster(const Eigen::MatrixXd &m) {
    Raster r(static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            r.at(i, k, 0) = static_cast<float>(m(i, k));
        }
    }
    return r;
}

Eigen::MatrixXd raster_to_matrix(const Raster &r) {
    if (r.channels != 1) {
        throw InputError("weight rasters must have one channel");
    }
    Eigen::MatrixXd m(r.height, r.width);
    for (std::uint32_t i = 0; i < r.height; ++i) {
        for (std::uint32_t k = 0; k < r.width; ++k) {
            m(i, k) = r.at(i, k, 0);
        }
    }
    return m;
}

std::vector<std::pair<const char *, Eigen::MatrixXd *>> tensors(WeightSet &w, Eigen::MatrixXd &bias) {
    return {{"wq", &w.wq},         {"wk", &w.wk},         {"wv", &w.wv}, {"wo", &w.wo},
            {"down_q", &w.down_q}, {"down_k", &w.down_k}, {"down_v", &w.down_v}, {"up", &w.up},
            {"latup_proj", &w.latup_proj}, {"latup_bias", &bias}};
}

}  // namespace

void save_weights(const std::filesystem::path &dir, const WeightSet &w) {
    std::filesystem::create_directories(dir);
    WeightSet copy = w;
    Eigen::MatrixXd bias = w.latup_bias;
    json manifest;
    manifest["format"] = "CRAYRAST";
    manifest["tensors"] = json::array();
    for (auto &[name, m] : tensors(copy, bias)) {
        const std::string file = std::string(name) + ".crayrast";
        write_raster(dir / file, matrix_to_raster(*m));
        manifest["tensors"].push_back({{"name", name}, {"file", file}, {"rows", m->rows()}, {"cols", m->cols()}});
    }
    write_json(dir / "manifest.json", manifest);
}

WeightSet load_weights(const std::filesystem::path &dir) {
    const json manifest = read_json(dir / "manifest.json");
    WeightSet w;
    Eigen::MatrixXd bias;
    auto slots = tensors(w, bias);
    for (const auto &entry : manifest.at("tensors")) {
        const auto name = field<std::string>(entry, "name");
        auto it = std::find_if(slots.begin(), slots.end(), [&](const auto &s) { return name == s.first; });
        if (it == slots.end()) {
            throw InputError("unknown tensor '" + name + "' in weight manifest");
        }
        *it->second = raster_to_matrix(read_raster(dir / field<std::string>(entry, "file")));
    }
    if (bias.rows() == 1) {
        w.latup_bias = bias.row(0);
    }
    return w;
}

}  // namespace camray
