#pragma once

// Reference implementations used only by tests. None of these call into the library code
// they are meant to check.

#include "camray/attention.hpp"
#include "camray/cameras.hpp"
#include "camray/raster.hpp"
#include "camray/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace oracle {

using camray::Vec2;
using camray::Vec3;

/// Dense blkdiag(D_1..D_T) attention with explicit exp/normalize. `blocks` are the per-token
/// head_dim × head_dim operator matrices.
Eigen::MatrixXd dense_attention(const Eigen::MatrixXd &Q, const Eigen::MatrixXd &K, const Eigen::MatrixXd &V,
                                const std::vector<Eigen::MatrixXd> &blocks, camray::EncodingKind kind);

/// Dense matrix of a token operator built from scratch: kron(I, ray_block) ⊕ rotations.
Eigen::MatrixXd operator_matrix(const camray::TokenOperator &op);

/// Pinhole unprojection written from the textbook formula (f = (W/2)/tan(fov/2)).
Vec3 pinhole_direction(double xfov_deg, int width, int height, double u, double v);

/// UCM projection from β = z + ξ‖p‖; no validity checks beyond β > 0.
std::optional<Vec2> ucm_project(double xfov_deg, double xi, int width, int height, const Vec3 &p);

/// Closed-form latitude of a unit direction in the y-down world.
double latitude(const Vec3 &d);

/// Up direction at a pixel by rotating the world ray with Eigen::AngleAxis and projecting with
/// ucm_project (or the ERP formula). `dc` is the camera-frame ray, `R` the camera-to-world rotation.
std::optional<Vec2> up_vector(const camray::CameraModel &cam, const camray::Mat3 &R, const Vec3 &dc, double u,
                              double v, double delta);

struct Similarity {
    double scale;
    double yaw;
    Vec3 translation;
    double rmse;
};

/// Brute-force yaw search on a 0.1° grid; scale and translation are solved for each yaw.
Similarity grid_yaw_alignment(std::span<const Vec3> src, std::span<const Vec3> dst, double step_deg = 0.1);

/// Spherical checkerboard in longitude/latitude: 0.2 / 0.8 cells of `cell_deg`.
double checker(const Vec3 &d, double cell_deg = 22.5);
/// Smooth, band-limited test signal on the sphere.
double smooth_field(const Vec3 &d);

/// Panorama direction of the pixel center (col, row).
Vec3 erp_direction(int width, int height, double col, double row);

template <typename F>
camray::Raster erp_panorama(int width, int height, F &&f) {
    camray::Raster r(height, width, 1);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            r.at(row, col, 0) = static_cast<float>(f(erp_direction(width, height, col + 0.5, row + 0.5)));
        }
    }
    return r;
}

/// Random rotation from a normalized Gaussian quaternion.
camray::Rotation3 random_rotation(camray::SplitMix64 &rng);
camray::Pose random_pose(camray::SplitMix64 &rng, double translation_scale = 2.0);
Eigen::MatrixXd random_matrix(camray::SplitMix64 &rng, int rows, int cols);

}  // namespace oracle
