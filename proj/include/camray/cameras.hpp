#pragma once

#include "camray/geometry.hpp"
#include "camray/grid.hpp"

#include <optional>
#include <string>

namespace camray {

enum class CameraKind { pinhole, ucm, erp };

std::string to_string(CameraKind kind);

/// Continuous pixel coordinate. Origin at the top-left image corner; the center of pixel
/// (col, row) is at (col + 0.5, row + 0.5).
struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

inline PixelCoord pixel_center(int col, int row) { return {col + 0.5, row + 0.5}; }

/// Focal length in pixels for a unified camera with horizontal field of view `xfov_deg`:
/// f = (W/2)(cos γ + ξ)/sin γ with γ = xfov/2. Throws DomainError when the focal would
/// be non-positive or infinite.
double focal_from_fov(double xfov_deg, double xi, int width);

/// Central camera: pinhole, unified camera model (single ξ) or equirectangular.
/// Pinhole is the unified model with ξ = 0. The principal point is the image center.
class CameraModel {
public:
    static CameraModel ucm(double xfov_deg, double xi, int width, int height);
    static CameraModel pinhole(double xfov_deg, int width, int height);
    static CameraModel erp(int width, int height);

    CameraKind kind() const { return kind_; }
    double xfov_deg() const { return xfov_deg_; }
    double xi() const { return xi_; }
    int width() const { return width_; }
    int height() const { return height_; }
    double focal() const { return focal_; }
    double cx() const { return 0.5 * width_; }
    double cy() const { return 0.5 * height_; }

    bool is_erp() const { return kind_ == CameraKind::erp; }
    /// True for every linear (ξ = 0) perspective camera, whichever kind tag it carries.
    bool is_pinhole() const { return kind_ != CameraKind::erp && xi_ == 0.0; }

    /// Pixel-to-ray map. Returns nullopt for pixels outside the lens's image of the sphere.
    std::optional<Vec3> try_unproject(const PixelCoord &p) const;
    /// Camera-frame ray through `p` with origin 0. Throws DomainError when out of model.
    Ray unproject(const PixelCoord &p) const;

    /// Point-to-pixel map. Returns nullopt when β = p_z + ξ‖p‖ ≤ 0 or p is the origin.
    std::optional<PixelCoord> try_project(const Vec3 &point) const;
    PixelCoord project(const Vec3 &point) const;

    /// True when the direction lies in the region where project and unproject are mutual
    /// inverses. For ξ > 1 this excludes the back-folded cap beyond cos θ = −1/ξ.
    bool in_model(const Vec3 &direction) const;

    bool in_image(const PixelCoord &p) const {
        return p.u >= 0.0 && p.v >= 0.0 && p.u <= width_ && p.v <= height_;
    }

    /// Intrinsic matrix K. Throws DomainError for equirectangular cameras.
    Mat3 intrinsics() const;

    /// Same lens at a different resolution (field of view preserved).
    CameraModel resized(int width, int height) const;

private:
    CameraModel(CameraKind kind, double xfov_deg, double xi, int width, int height);

    CameraKind kind_;
    double xfov_deg_;
    double xi_;
    int width_;
    int height_;
    double focal_;
};

/// World-frame rays for every pixel center; rays whose pixel is out of model stay invalid.
Grid<Ray> ray_map(const CameraModel &cam, const Pose &pose);

struct RectifyMap {
    CameraModel dst;
    /// For each destination pixel, the source pixel seeing the same ray.
    Grid<Vec2> src_pixels;
};

/// Remap from a capped-FoV pinhole camera back to the distorted source camera:
/// src_pixels(dst) = Π_src(Φ_dst(dst)). The destination keeps the source resolution and
/// uses xfov = min(src.xfov, cap).
RectifyMap rectify_map(const CameraModel &src, double xfov_cap_deg = 100.0);

}  // namespace camray
