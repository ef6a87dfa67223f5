#include "camray/attention.hpp"
#include "camray/cameras.hpp"
#include "camray/encodings.hpp"
#include "camray/image.hpp"
#include "camray/json_io.hpp"
#include "camray/metrics.hpp"
#include "camray/parallel.hpp"
#include "camray/raster.hpp"
#include "camray/rng.hpp"
#include "camray/synthesis.hpp"

#include "invariance.hpp"
#include "manifest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace camray;
using camray::cli::Manifest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;
constexpr int kExitInvariance = 4;

std::vector<std::string> g_command;

fs::path require_file(const std::string &path, const char *what) {
    if (path.empty()) {
        throw InputError(std::string("missing ") + what);
    }
    if (!fs::is_regular_file(path)) {
        throw InputError(std::string(what) + " not found: " + path);
    }
    return path;
}

void emit(const json &j, const std::string &out) {
    if (out.empty()) {
        std::cout << dump_json(j);
    } else {
        write_json(out, j);
    }
}

Manifest make_manifest(std::uint64_t seed, std::vector<fs::path> inputs) {
    Manifest m;
    m.seed = seed;
    m.command = g_command;
    m.inputs = std::move(inputs);
    return m;
}

std::string frame_name(const char *stem, size_t i, const char *ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.%s", stem, i, ext);
    return buf;
}

std::vector<fs::path> list_pngs(const fs::path &p) {
    std::vector<fs::path> files;
    if (fs::is_regular_file(p)) {
        files.push_back(p);
    } else if (fs::is_directory(p)) {
        for (const auto &e : fs::directory_iterator(p)) {
            if (e.is_regular_file() && e.path().extension() == ".png") {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        throw InputError("input path not found: " + p.string());
    }
    if (files.empty()) {
        throw InputError("no PNG frames in " + p.string());
    }
    return files;
}

Pose read_pose(const std::string &path) { return pose_from_json(read_json(require_file(path, "pose file"))); }

CameraModel read_camera(const std::string &path) {
    return camera_from_json(read_json(require_file(path, "camera file")));
}

Trajectory read_trajectory(const std::string &path) {
    return trajectory_from_json(read_json(require_file(path, "trajectory file")));
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string erp, trajectory, camera, sample, augment = "none", out;
    std::uint64_t seed = 0;
    int frames = 81, width = 832, height = 480;
};

int cmd_render(const RenderArgs &a) {
    if (a.out.empty()) {
        throw InputError("--out is required");
    }
    if (a.camera.empty() == a.sample.empty()) {
        throw InputError("exactly one of --camera or --sample is required");
    }
    const auto mode = augmentation_mode_from_string(a.augment);
    std::vector<fs::path> inputs;
    Trajectory traj;
    if (!a.trajectory.empty()) {
        traj = read_trajectory(a.trajectory);
        inputs.push_back(a.trajectory);
    } else {
        if (a.frames < 1) {
            throw InputError("--frames must be positive");
        }
        traj = Trajectory::from_poses(std::vector<Pose>(a.frames));
    }
    if (traj.empty()) {
        throw InputError("trajectory has no frames");
    }
    const auto pano_files = list_pngs(a.erp);
    if (pano_files.size() != 1 && pano_files.size() != traj.size()) {
        throw InputError("panorama count " + std::to_string(pano_files.size()) + " does not match trajectory length " +
                         std::to_string(traj.size()));
    }
    inputs.insert(inputs.end(), pano_files.begin(), pano_files.end());

    SplitMix64 rng(a.seed);
    std::optional<CameraModel> cam;
    if (!a.camera.empty()) {
        cam = read_camera(a.camera);
        inputs.push_back(a.camera);
    } else {
        cam = sample_camera(lens_category_from_string(a.sample), rng, a.width, a.height);
    }
    if (cam->is_erp()) {
        throw InputError("virtual camera must be pinhole or ucm");
    }
    const auto offsets = augment_offsets(traj.size(), mode, rng);

    fs::create_directories(a.out);
    json frames = json::array();
    Manifest manifest = make_manifest(a.seed, inputs);
    Raster pano;
    for (size_t i = 0; i < traj.size(); ++i) {
        if (i == 0 || pano_files.size() > 1) {
            pano = read_png(pano_files[pano_files.size() == 1 ? 0 : i]);
        }
        const Rotation3 r_aug = offset_rotation(offsets[i]);
        const Pose virt = compose_virtual_pose(traj.frames[i].pose, r_aug);
        RenderedView view;
        try {
            view = render_view(pano, *cam, r_aug);
        } catch (const DomainError &e) {
            throw DomainError("frame " + std::to_string(i) + ": " + e.what());
        }
        const auto img = frame_name("frame", i, "png"), mask = frame_name("mask", i, "png");
        write_png(fs::path(a.out) / img, view.image);
        write_mask_png(fs::path(a.out) / mask, view.mask, cam->width(), cam->height());
        manifest.outputs.push_back(img);
        manifest.outputs.push_back(mask);
        const auto pr = pitch_roll_from_rotation(virt.rotation);
        frames.push_back({{"i", traj.frames[i].index},
                          {"image", img},
                          {"mask", mask},
                          {"T_wc", pose_to_json(virt)},
                          {"offset_deg", {offsets[i].yaw_deg, offsets[i].pitch_deg, offsets[i].roll_deg}},
                          {"pitch_deg", pr.pitch_deg},
                          {"roll_deg", pr.roll_deg}});
    }
    json ann;
    ann["camera"] = camera_to_json(*cam);
    ann["augment"] = to_string(mode);
    ann["seed"] = a.seed;
    ann["frames"] = std::move(frames);
    write_json(fs::path(a.out) / "annotation.json", ann);
    manifest.outputs.push_back("annotation.json");
    manifest.write(fs::path(a.out) / "manifest.json");
    return kExitOk;
}

// ---------------------------------------------------------------- latup / plucker

struct MapArgs {
    std::string camera, pose, out;
    double delta = 0.1;
};

float to_unit(double v, double lo, double hi) { return static_cast<float>(std::clamp((v - lo) / (hi - lo), 0.0, 1.0)); }

void write_map_outputs(const MapArgs &a, const Raster &values, const std::vector<std::uint8_t> &mask,
                       const Raster &viz) {
    const fs::path prefix(a.out);
    if (prefix.has_parent_path()) {
        fs::create_directories(prefix.parent_path());
    }
    write_raster(a.out + ".crayrast", values);
    write_mask_png(a.out + "_mask.png", mask, values.width, values.height);
    write_png(a.out + ".png", viz);
    Manifest m = make_manifest(0, {fs::path(a.camera), fs::path(a.pose)});
    const auto stem = prefix.filename().string();
    m.outputs = {stem + ".crayrast", stem + "_mask.png", stem + ".png"};
    m.write(a.out + ".manifest.json");
}

int cmd_latup(const MapArgs &a) {
    if (a.out.empty()) {
        throw InputError("--out is required");
    }
    const auto cam = read_camera(a.camera);
    const auto pose = read_pose(a.pose);
    const auto r = latup_raster(cam, pose, a.delta);
    Raster viz(r.values.height, r.values.width, 3);
    for (size_t i = 0; i < r.mask.size(); ++i) {
        if (!r.mask[i]) {
            continue;
        }
        viz.data[3 * i] = to_unit(r.values.data[3 * i], -M_PI / 2, M_PI / 2);
        viz.data[3 * i + 1] = to_unit(r.values.data[3 * i + 1], -1, 1);
        viz.data[3 * i + 2] = to_unit(r.values.data[3 * i + 2], -1, 1);
    }
    write_map_outputs(a, r.values, r.mask, viz);
    return kExitOk;
}

int cmd_plucker(const MapArgs &a) {
    if (a.out.empty()) {
        throw InputError("--out is required");
    }
    const auto cam = read_camera(a.camera);
    const auto pose = read_pose(a.pose);
    const auto rays = ray_map(cam, pose);
    Raster values(cam.height(), cam.width(), 6, std::numeric_limits<float>::quiet_NaN());
    Raster viz(cam.height(), cam.width(), 3);
    for (size_t i = 0; i < rays.data.size(); ++i) {
        if (!rays.valid[i]) {
            continue;
        }
        const auto p = plucker(rays.data[i]);
        for (int k = 0; k < 3; ++k) {
            values.data[6 * i + k] = static_cast<float>(p.direction[k]);
            values.data[6 * i + 3 + k] = static_cast<float>(p.moment[k]);
            viz.data[3 * i + k] = to_unit(p.direction[k], -1, 1);
        }
    }
    write_map_outputs(a, values, rays.valid, viz);
    return kExitOk;
}

// ---------------------------------------------------------------- attend

struct AttendArgs {
    std::string config, report;
    std::uint64_t seed = 0;
};

int cmd_attend(const AttendArgs &a) {
    cli::SuiteConfig cfg;
    std::vector<fs::path> inputs;
    if (!a.config.empty()) {
        cfg = cli::suite_config_from_json(read_json(require_file(a.config, "config file")));
        inputs.push_back(a.config);
    }
    const auto rows = cli::run_invariance_suite(cfg, a.seed);
    bool ok = true;
    json table = json::array();
    for (const auto &r : rows) {
        ok = ok && r.pass();
        table.push_back({{"invariant", r.name}, {"deviation", r.deviation}, {"tolerance", r.tolerance},
                         {"pass", r.pass()}});
    }
    json report;
    report["config"] = attention_config_to_json(cfg.attention);
    report["camera"] = camera_to_json(cfg.camera);
    report["seed"] = a.seed;
    report["invariants"] = std::move(table);
    report["pass"] = ok;
    emit(report, a.report);
    if (!a.report.empty()) {
        Manifest m = make_manifest(a.seed, inputs);
        m.outputs = {fs::path(a.report).filename().string()};
        m.write(a.report + ".manifest.json");
    }
    if (!ok) {
        std::cerr << "camray attend: invariance check failed\n";
    }
    return ok ? kExitOk : kExitInvariance;
}

// ---------------------------------------------------------------- metrics & co.

int cmd_metrics(const std::string &gt, const std::string &pred, size_t samples, const std::string &out) {
    emit(pose_metrics_to_json(pose_metrics(read_trajectory(gt), read_trajectory(pred), samples)), out);
    return kExitOk;
}

int cmd_align(const std::string &src, const std::string &dst, const std::string &out) {
    const auto s = read_trajectory(src).centers();
    const auto d = read_trajectory(dst).centers();
    emit(alignment_to_json(align_yaw_umeyama(s, d)), out);
    return kExitOk;
}

int cmd_score(const std::string &traj, const std::string &out) {
    json j;
    j["rotation_score_deg"] = rotation_score(read_trajectory(traj));
    emit(j, out);
    return kExitOk;
}

int cmd_calib(const std::string &gt, const std::string &pred, const std::string &out) {
    const auto g = calib_from_json(read_json(require_file(gt, "calibration file")));
    const auto p = calib_from_json(read_json(require_file(pred, "calibration file")));
    emit(calib_errors_to_json(calib_errors(g, p)), out);
    return kExitOk;
}

int cmd_sample(const std::string &category, std::uint64_t seed, int count, int width, int height,
               const std::string &out) {
    if (count < 1) {
        throw InputError("--count must be positive");
    }
    SplitMix64 rng(seed);
    const auto cat = lens_category_from_string(category);
    json cams = json::array();
    for (int i = 0; i < count; ++i) {
        cams.push_back(camera_to_json(sample_camera(cat, rng, width, height)));
    }
    emit(count == 1 ? cams[0] : cams, out);
    return kExitOk;
}

int cmd_rectify(const std::string &camera, const std::string &in, const std::string &out, double cap) {
    if (out.empty()) {
        throw InputError("--out is required");
    }
    const auto cam = read_camera(camera);
    const auto files = list_pngs(in);
    std::vector<Raster> frames;
    for (const auto &f : files) {
        frames.push_back(read_png(f));
        if (frames.back().width != static_cast<std::uint32_t>(cam.width()) ||
            frames.back().height != static_cast<std::uint32_t>(cam.height())) {
            throw InputError(f.string() + " does not match the camera resolution");
        }
    }
    const auto rect = prep_rectified(frames, cam, cap);
    fs::create_directories(out);
    std::vector<fs::path> inputs = {camera};
    inputs.insert(inputs.end(), files.begin(), files.end());
    Manifest m = make_manifest(0, inputs);
    for (size_t i = 0; i < rect.frames.size(); ++i) {
        const auto name = files[i].filename().string();
        write_png(fs::path(out) / name, rect.frames[i]);
        m.outputs.push_back(name);
    }
    write_mask_png(fs::path(out) / "mask.png", rect.mask, rect.camera.width(), rect.camera.height());
    write_json(fs::path(out) / "camera.json", camera_to_json(rect.camera));
    m.outputs.push_back("mask.png");
    m.outputs.push_back("camera.json");
    m.write(fs::path(out) / "manifest.json");
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    g_command.assign(argv, argv + argc);
    if (!g_command.empty()) {
        g_command[0] = "camray";
    }

    CLI::App app{"Camera ray encodings, lens-aware rendering and pose metrics"};
    app.set_version_flag("--version", CAMRAY_VERSION);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: CAMRAY_THREADS or 1)");

    RenderArgs ra;
    auto *render = app.add_subcommand("render", "Render virtual-camera frames from panoramas");
    render->add_option("--erp", ra.erp, "Panorama PNG or directory of PNG frames")->required();
    render->add_option("--trajectory", ra.trajectory, "Panorama trajectory JSON");
    render->add_option("--camera", ra.camera, "Camera JSON");
    render->add_option("--sample", ra.sample, "Sample a lens: pinhole, wide, fisheye or extreme");
    render->add_option("--augment", ra.augment, "none, yaw, yaw_pitch or pan");
    render->add_option("--seed", ra.seed);
    render->add_option("--frames", ra.frames, "Frame count without a trajectory");
    render->add_option("--width", ra.width, "Width of sampled cameras");
    render->add_option("--height", ra.height, "Height of sampled cameras");
    render->add_option("--out", ra.out, "Output directory")->required();

    MapArgs la;
    auto *latup = app.add_subcommand("latup", "Lat-Up map raster (latitude, up_u, up_v)");
    latup->add_option("--camera", la.camera)->required();
    latup->add_option("--pose", la.pose)->required();
    latup->add_option("--delta", la.delta, "Up-map rotation step in radians");
    latup->add_option("--out", la.out, "Output prefix")->required();

    MapArgs pa;
    auto *plk = app.add_subcommand("plucker", "Plucker ray map raster (direction, moment)");
    plk->add_option("--camera", pa.camera)->required();
    plk->add_option("--pose", pa.pose)->required();
    plk->add_option("--out", pa.out, "Output prefix")->required();

    AttendArgs aa;
    auto *attend = app.add_subcommand("attend", "Run the attention invariance suite");
    attend->add_option("--config", aa.config, "Suite config JSON");
    attend->add_option("--seed", aa.seed);
    attend->add_option("--report", aa.report, "Report path (default: stdout)");

    std::string gt, pred, out, src, dst, traj, camera, in, category = "pinhole";
    size_t samples = 16;
    std::uint64_t seed = 0;
    int count = 1, width = 832, height = 480;
    double cap = 100.0;

    auto *metrics = app.add_subcommand("metrics", "RotErr / TransErr / CamMC between trajectories");
    metrics->add_option("--gt", gt)->required();
    metrics->add_option("--pred", pred)->required();
    metrics->add_option("--samples", samples);
    metrics->add_option("--out", out);

    auto *align = app.add_subcommand("align", "Similarity alignment restricted to yaw");
    align->add_option("--src", src)->required();
    align->add_option("--dst", dst)->required();
    align->add_option("--out", out);

    auto *rectify = app.add_subcommand("rectify", "Rectify frames to a capped-FoV pinhole");
    rectify->add_option("--camera", camera)->required();
    rectify->add_option("--in", in)->required();
    rectify->add_option("--out", out)->required();
    rectify->add_option("--cap", cap, "Horizontal FoV cap in degrees");

    auto *score = app.add_subcommand("score", "Largest rotation relative to the first frame");
    score->add_option("--trajectory", traj)->required();
    score->add_option("--out", out);

    auto *sample = app.add_subcommand("sample", "Sample camera intrinsics for a lens category");
    sample->add_option("--category", category);
    sample->add_option("--seed", seed);
    sample->add_option("--count", count);
    sample->add_option("--width", width);
    sample->add_option("--height", height);
    sample->add_option("--out", out);

    auto *calib = app.add_subcommand("calib", "Pitch / roll / FoV / distortion errors");
    calib->add_option("--gt", gt)->required();
    calib->add_option("--pred", pred)->required();
    calib->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        parallel::set_threads(parallel::resolve_threads(threads));
        if (*render) return cmd_render(ra);
        if (*latup) return cmd_latup(la);
        if (*plk) return cmd_plucker(pa);
        if (*attend) return cmd_attend(aa);
        if (*metrics) return cmd_metrics(gt, pred, samples, out);
        if (*align) return cmd_align(src, dst, out);
        if (*rectify) return cmd_rectify(camera, in, out, cap);
        if (*score) return cmd_score(traj, out);
        if (*sample) return cmd_sample(category, seed, count, width, height, out);
        if (*calib) return cmd_calib(gt, pred, out);
    } catch (const DomainError &e) {
        std::cerr << "camray: domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const InputError &e) {
        std::cerr << "camray: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error &e) {
        std::cerr << "camray: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception &e) {
        std::cerr << "camray: input error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
