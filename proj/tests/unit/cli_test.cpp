#include "camray/image.hpp"
#include "camray/json_io.hpp"
#include "camray/raster.hpp"
#include "camray/synthesis.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace camray;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::path(CAMRAY_TEST_TMP) / "cli";

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Result run(const std::string &args) {
    fs::create_directories(kDir);
    const auto out = kDir / "stdout.txt", err = kDir / "stderr.txt";
    const std::string cmd =
        std::string(CAMRAY_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string &name, const json &j) {
    fs::create_directories(kDir);
    write_json(kDir / name, j);
    return kDir / name;
}

fs::path checker_panorama() {
    const auto path = kDir / "pano" / "pano.png";
    if (!fs::exists(path)) {
        fs::create_directories(path.parent_path());
        const auto mono = oracle::erp_panorama(1024, 512, [](const Vec3 &d) { return oracle::checker(d); });
        Raster rgb(512, 1024, 3);
        for (size_t i = 0; i < mono.data.size(); ++i) {
            rgb.data[3 * i] = mono.data[i];
            rgb.data[3 * i + 1] = 1.0f - mono.data[i];
            rgb.data[3 * i + 2] = 0.5f;
        }
        write_png(path, rgb);
    }
    return path;
}

fs::path trajectory_file(const std::string &name, int frames) {
    std::vector<Pose> poses;
    for (int i = 0; i < frames; ++i) {
        poses.push_back({yaw_rotation(0.05 * i), Vec3(0.1 * i, 0, 0)});
    }
    return write(name, trajectory_to_json(Trajectory::from_poses(poses)));
}

}  // namespace

TEST(Cli, AttendDefaultPasses) {
    const auto r = run("attend --seed 3 --report " + (kDir / "report.json").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = read_json(kDir / "report.json");
    ASSERT_EQ(report["invariants"].size(), 4u);
    for (const auto &row : report["invariants"]) {
        EXPECT_TRUE(row["pass"].get<bool>()) << row["invariant"];
        EXPECT_LE(row["deviation"].get<double>(), row["tolerance"].get<double>());
    }
    EXPECT_TRUE(fs::exists(kDir / "report.json.manifest.json"));
}

TEST(Cli, AttendAllKinds) {
    for (const char *kind : {"none", "cape", "gta", "prope", "ucpe_ray", "ucpe_hybrid"}) {
        const auto cfg = write("attend.json", {{"kind", kind}, {"model_dim", 128}, {"heads", 4}, {"trials", 3}});
        EXPECT_EQ(run("attend --seed 1 --config " + cfg.string()).code, 0) << kind;
    }
}

TEST(Cli, AttendPropeRejectsFisheye) {
    const auto cfg = write("prope.json", {{"kind", "prope"}, {"camera", camera_to_json(CameraModel::ucm(150, 0.8, 64, 48))}});
    const auto r = run("attend --config " + cfg.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("pinhole"), std::string::npos);
}

TEST(Cli, RenderMissingTrajectory) {
    const auto r = run("render --erp " + checker_panorama().string() + " --trajectory /no/such/traj.json --sample wide --out " +
                       (kDir / "r0").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/such/traj.json"), std::string::npos);
}

TEST(Cli, RenderDeterministic) {
    const auto pano = checker_panorama().string();
    const std::string common = "render --erp " + pano + " --sample pinhole --seed 7 --frames 3 --width 96 --height 64";
    ASSERT_EQ(run(common + " --out " + (kDir / "ra").string()).code, 0);
    ASSERT_EQ(run(common + " --out " + (kDir / "rb").string()).code, 0);
    EXPECT_EQ(slurp(kDir / "ra" / "annotation.json"), slurp(kDir / "rb" / "annotation.json"));
    EXPECT_EQ(slurp(kDir / "ra" / "frame_0002.png"), slurp(kDir / "rb" / "frame_0002.png"));
    const auto manifest = read_json(kDir / "ra" / "manifest.json");
    EXPECT_EQ(manifest["seed"].get<int>(), 7);
    EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(Cli, RenderThreadIndependent) {
    const auto pano = checker_panorama().string();
    const auto traj = trajectory_file("t4.json", 4);
    const std::string common =
        "render --erp " + pano + " --trajectory " + traj.string() + " --sample extreme --augment pan --seed 11 --width 160 --height 96";
    ASSERT_EQ(run("--threads 1 " + common + " --out " + (kDir / "t1").string()).code, 0);
    ASSERT_EQ(run("--threads 3 " + common + " --out " + (kDir / "t3").string()).code, 0);
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.png", i);
        EXPECT_EQ(slurp(kDir / "t1" / name), slurp(kDir / "t3" / name));
        std::snprintf(name, sizeof name, "mask_%04d.png", i);
        EXPECT_EQ(slurp(kDir / "t1" / name), slurp(kDir / "t3" / name));
    }
    EXPECT_EQ(slurp(kDir / "t1" / "annotation.json"), slurp(kDir / "t3" / "annotation.json"));
}

TEST(Cli, RenderSixteenFramesQuickly) {
    const auto pano = checker_panorama().string();
    const auto traj = trajectory_file("t16.json", 16);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run("render --erp " + pano + " --trajectory " + traj.string() +
                       " --sample fisheye --augment yaw_pitch --seed 2 --out " + (kDir / "r16").string());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 30.0);
    const auto ann = read_json(kDir / "r16" / "annotation.json");
    ASSERT_EQ(ann["frames"].size(), 16u);
    // Virtual poses keep the panorama translations.
    EXPECT_NEAR(ann["frames"][5]["T_wc"][3].get<double>(), 0.5, 1e-12);
}

TEST(Cli, LatupPinholeProfile) {
    const auto cam = CameraModel::pinhole(90, 64, 48);
    const auto camf = write("cam.json", camera_to_json(cam));
    const auto posef = write("pose.json", {{"T_wc", pose_to_json(Pose::identity())}});
    const auto prefix = (kDir / "lat" / "id").string();
    ASSERT_EQ(run("latup --camera " + camf.string() + " --pose " + posef.string() + " --out " + prefix).code, 0);
    const auto r = read_raster(prefix + ".crayrast");
    ASSERT_EQ(r.channels, 3u);
    const double f = cam.focal();
    for (int row = 0; row < 48; ++row) {
        for (int col = 0; col < 64; ++col) {
            const double x = (col + 0.5 - 32) / f, y = (row + 0.5 - 24) / f;
            ASSERT_NEAR(r.at(row, col, 0), std::atan2(-y, std::sqrt(x * x + 1)), 1e-6);
        }
    }
    EXPECT_TRUE(fs::exists(prefix + ".png"));
    EXPECT_TRUE(fs::exists(prefix + "_mask.png"));
    const auto bytes = slurp(prefix + ".crayrast");
    EXPECT_EQ(encode_raster(r), std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

TEST(Cli, PluckerZeroTranslation) {
    const auto camf = write("cam_f.json", camera_to_json(CameraModel::ucm(190, 2.0, 64, 48)));
    Pose p;
    p.rotation = offset_rotation({30, 10, 0});
    const auto posef = write("pose_r.json", pose_to_json(p));
    const auto prefix = (kDir / "plk").string();
    ASSERT_EQ(run("plucker --camera " + camf.string() + " --pose " + posef.string() + " --out " + prefix).code, 0);
    const auto r = read_raster(prefix + ".crayrast");
    ASSERT_EQ(r.channels, 6u);
    size_t valid = 0;
    for (size_t i = 0; i < r.data.size() / 6; ++i) {
        if (std::isnan(r.data[6 * i])) {
            continue;
        }
        ++valid;
        for (int k = 3; k < 6; ++k) {
            ASSERT_EQ(r.data[6 * i + k], 0.0f);
        }
    }
    EXPECT_GT(valid, 0u);
    EXPECT_LT(valid, r.data.size() / 6);
}

TEST(Cli, MetricsAlignScoreCalib) {
    const auto gt = trajectory_file("gt.json", 20);
    auto r = run("metrics --gt " + gt.string() + " --pred " + gt.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = json::parse(r.out);
    EXPECT_EQ(m["rot_err_deg"].get<double>(), 0.0);
    EXPECT_EQ(m["trans_err"].get<double>(), 0.0);
    EXPECT_EQ(m["cam_mc"].get<double>(), 0.0);

    std::vector<Pose> src, dst;
    SplitMix64 rng(5);
    for (int i = 0; i < 12; ++i) {
        Pose s;
        s.translation = Vec3(rng.normal(), rng.normal(), rng.normal());
        Pose d;
        d.translation = 2.0 * (rot_y(deg2rad(30)) * s.translation) + Vec3(1, 0, 2);
        src.push_back(s);
        dst.push_back(d);
    }
    const auto sf = write("src.json", trajectory_to_json(Trajectory::from_poses(src)));
    const auto df = write("dst.json", trajectory_to_json(Trajectory::from_poses(dst)));
    r = run("align --src " + sf.string() + " --dst " + df.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto a = json::parse(r.out);
    EXPECT_NEAR(a["scale"].get<double>(), 2.0, 1e-9);
    EXPECT_NEAR(a["yaw_deg"].get<double>(), 30.0, 1e-9);
    EXPECT_LE(a["rmse"].get<double>(), 1e-9);

    const auto still = write("still.json", trajectory_to_json(Trajectory::from_poses(std::vector<Pose>(5))));
    r = run("score --trajectory " + still.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["rotation_score_deg"].get<double>(), 0.0);

    const auto c1 = write("c1.json", calib_to_json({{179.0}, {0.0}, 100, 0, 0}));
    const auto c2 = write("c2.json", calib_to_json({{-179.0}, {3.0}, 100, 0, 0}));
    r = run("calib --gt " + c1.string() + " --pred " + c2.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["pitch_err_deg"].get<double>(), 2.0, 1e-9);
}

TEST(Cli, DomainErrorExitCode) {
    const auto same = write("same.json", trajectory_to_json(Trajectory::from_poses(std::vector<Pose>(5))));
    const auto r = run("align --src " + same.string() + " --dst " + same.string());
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, MalformedJsonExitCode) {
    {
        std::ofstream f(kDir / "bad.json");
        f << "{\"frames\": [";
    }
    const auto r = run("score --trajectory " + (kDir / "bad.json").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.json"), std::string::npos);
    EXPECT_EQ(run("score").code, 2);
}

TEST(Cli, RectifyPinholeIsIdentity) {
    const auto cam = CameraModel::pinhole(90, 48, 32);
    const auto camf = write("rect_cam.json", camera_to_json(cam));
    const auto in = kDir / "rect_in";
    fs::create_directories(in);
    Raster img(32, 48, 3);
    SplitMix64 rng(9);
    for (auto &v : img.data) {
        v = static_cast<float>(std::round(rng.uniform() * 255) / 255);
    }
    write_png(in / "a.png", img);
    const auto out = kDir / "rect_out";
    ASSERT_EQ(run("rectify --camera " + camf.string() + " --in " + in.string() + " --out " + out.string()).code, 0);
    EXPECT_EQ(slurp(in / "a.png"), slurp(out / "a.png"));
    EXPECT_EQ(camera_from_json(read_json(out / "camera.json")).xfov_deg(), 90.0);
}

TEST(Cli, SampleDeterministic) {
    const auto a = run("sample --category fisheye --seed 7 --count 5");
    const auto b = run("sample --category fisheye --seed 7 --count 5");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(json::parse(a.out).size(), 5u);
    EXPECT_EQ(run("sample --category tele").code, 2);
}
