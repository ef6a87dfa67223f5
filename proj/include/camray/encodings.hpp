#pragma once

#include "camray/cameras.hpp"
#include "camray/geometry.hpp"
#include "camray/grid.hpp"
#include "camray/raster.hpp"

#include <optional>
#include <string>
#include <vector>

namespace camray {

/// Raised when an encoding cannot represent the given camera (e.g. projective encoding of
/// a distorted lens). Treated as an input error.
class UnsupportedModelError : public InputError {
public:
    using InputError::InputError;
};

/// Local frame of a viewing ray: columns [x, y, z] with z along the ray.
struct RayFrame {
    Rotation3 rotation;
    Vec3 origin = Vec3::Zero();

    /// Ray-to-world transform T^wr.
    Mat4 to_world() const;
    /// World-to-ray transform T^rw.
    Mat4 from_world() const;
};

/// z = d, x = normalize(cam_down × z), y = z × x. When cam_down is (nearly) parallel to d,
/// x is completed from cam_right, then from the world x and y axes.
RayFrame ray_frame(const Ray &ray, const Vec3 &cam_down, const std::optional<Vec3> &cam_right = std::nullopt);

/// One attention token: the view it belongs to, its patch position and image sample point.
struct TokenRef {
    int frame = 0;
    int row = 0;
    int col = 0;
    int camera = 0;
    PixelCoord pixel;
};

struct TokenGrid {
    std::vector<TokenRef> tokens;

    /// rows × cols patches per view; each token samples its patch center.
    static TokenGrid patch_centers(const std::vector<CameraModel> &cams, int rows, int cols);
    size_t size() const { return tokens.size(); }
};

struct RayOperators {
    std::vector<Mat4> world_to_ray;
    std::vector<std::uint8_t> valid;
};

/// Per-token T^rw. The camera's downward axis in world is pose.rotation · [0, 1, 0].
/// Tokens whose pixel is outside the lens model get identity and valid = 0.
RayOperators ray_operators(const std::vector<CameraModel> &cams, const std::vector<Pose> &poses,
                           const TokenGrid &grid);

/// Elevation of a world direction above the horizontal plane (positive looks up).
double latitude(const Vec3 &world_dir);

Grid<double> latitude_map(const CameraModel &cam, const Pose &pose);

/// Unit image-plane direction toward world up at pixel `p`: rotate the pixel's world ray by
/// `delta` about d × up, re-project, normalize the displacement. nullopt when the ray is
/// parallel to world up or the perturbed ray leaves the model.
std::optional<Vec2> up_vector_at(const CameraModel &cam, const Pose &pose, const PixelCoord &p,
                                 double delta = 0.1);

Grid<Vec2> up_map(const CameraModel &cam, const Pose &pose, double delta = 0.1);

struct LatUpMap {
    Grid<double> lat;
    Grid<Vec2> up;
};

LatUpMap latup_map(const CameraModel &cam, const Pose &pose, double delta = 0.1);

/// Channels (lat, up_u, up_v); cells invalid in either map hold NaN and mask 0.
struct LatUpRaster {
    Raster values;
    std::vector<std::uint8_t> mask;
};

LatUpRaster latup_raster(const CameraModel &cam, const Pose &pose, double delta = 0.1);

/// (lat, up_u, up_v) at each token's sample point; zeros where invalid.
std::vector<Vec3> latup_tokens(const std::vector<CameraModel> &cams, const std::vector<Pose> &poses,
                               const TokenGrid &grid, double delta = 0.1);

/// Axial 2D RoPE angles for `rope_dim` features: the first rope_dim/4 subspaces rotate by
/// row·θ_j, the rest by col·θ_j, θ_j = base^(−2j/(rope_dim/2)).
std::vector<double> rope_angles(double row, double col, int rope_dim, double base = 10000.0);

enum class EncodingKind { none, cape, gta, prope, ucpe_ray, ucpe_hybrid };

std::string to_string(EncodingKind kind);
EncodingKind encoding_kind_from_string(const std::string &s);

/// Per-token block operator: the 4x4 ray block replicated over the leading ray_dims
/// features of a head, followed by 2x2 RoPE rotations over the remaining features.
struct TokenOperator {
    Mat4 ray_block = Mat4::Identity();
    Mat4 ray_block_inverse = Mat4::Identity();
    std::vector<double> rope_angles;
    int ray_dims = 0;
    int rope_dims = 0;

    int head_dim() const { return ray_dims + rope_dims; }
    static TokenOperator identity(int head_dim);
    /// Dense head_dim × head_dim matrix of the operator.
    Eigen::MatrixXd dense() const;
};

struct OperatorOptions {
    int head_dim = 16;
    /// Adds the RoPE half to cape/gta/prope as well (ucpe_hybrid always has it).
    bool hybrid_rope = false;
    double rope_base = 10000.0;
    /// Overrides the camera intrinsics for prope.
    std::optional<Mat3> intrinsics;
};

/// Ray/RoPE split of a head for the given kind; validates divisibility.
std::pair<int, int> operator_layout(EncodingKind kind, const OperatorOptions &opts);

/// Builds the operator of one token. cape/gta use T^cw of the token's camera, prope uses
/// [[K,0],[0,1]]·T^cw and requires a pinhole camera, ucpe uses the token's T^rw.
TokenOperator build_operator(EncodingKind kind, const CameraModel &cam, const Pose &pose, const TokenRef &token,
                             const OperatorOptions &opts);

/// Operators for every token of the grid (cams/poses indexed by TokenRef::camera).
std::vector<TokenOperator> build_operators(EncodingKind kind, const std::vector<CameraModel> &cams,
                                           const std::vector<Pose> &poses, const TokenGrid &grid,
                                           const OperatorOptions &opts);

}  // namespace camray
