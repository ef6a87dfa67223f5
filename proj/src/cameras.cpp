#include "camray/cameras.hpp"

#include "camray/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace camray {

std::string to_string(CameraKind kind) {
    switch (kind) {
        case CameraKind::pinhole:
            return "pinhole";
        case CameraKind::ucm:
            return "ucm";
        case CameraKind::erp:
            return "erp";
    }
    return "unknown";
}

namespace {

// Degree-argument sine on [0, 180], reduced to [0, 45] so that sin and cos agree bit-for-bit at
// 45 and vanish exactly at 0 and 90.
double sin_deg(double g) {
    if (g > 90.0) {
        g = 180.0 - g;
    }
    return g <= 45.0 ? std::sin(deg2rad(g)) : std::cos(deg2rad(90.0 - g));
}

double cos_deg(double g) { return g <= 90.0 ? sin_deg(90.0 - g) : -sin_deg(g - 90.0); }

}  // namespace

double focal_from_fov(double xfov_deg, double xi, int width) {
    if (!(xfov_deg > 0.0) || !(xfov_deg < 360.0) || !std::isfinite(xi)) {
        throw DomainError("xfov must lie in (0, 360) degrees, got " + std::to_string(xfov_deg));
    }
    const double gamma = 0.5 * xfov_deg;
    const double s = sin_deg(gamma);
    const double num = cos_deg(gamma) + xi;
    if (!(s > 0.0) || !(num > 0.0)) {
        throw DomainError("field of view " + std::to_string(xfov_deg) + " deg is not representable with xi=" +
                          std::to_string(xi));
    }
    return 0.5 * width * num / s;
}

CameraModel::CameraModel(CameraKind kind, double xfov_deg, double xi, int width, int height)
    : kind_(kind), xfov_deg_(xfov_deg), xi_(xi), width_(width), height_(height), focal_(0.0) {
    if (width < 1 || height < 1) {
        throw DomainError("camera dimensions must be positive");
    }
    if (kind != CameraKind::erp) {
        if (!(xi >= 0.0)) {
            throw DomainError("xi must be non-negative");
        }
        focal_ = focal_from_fov(xfov_deg, xi, width);
    }
}

CameraModel CameraModel::ucm(double xfov_deg, double xi, int width, int height) {
    return {CameraKind::ucm, xfov_deg, xi, width, height};
}

CameraModel CameraModel::pinhole(double xfov_deg, int width, int height) {
    return {CameraKind::pinhole, xfov_deg, 0.0, width, height};
}

CameraModel CameraModel::erp(int width, int height) { return {CameraKind::erp, 360.0, 0.0, width, height}; }

std::optional<Vec3> CameraModel::try_unproject(const PixelCoord &p) const {
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
        return std::nullopt;
    }
    if (is_erp()) {
        const double lon = (p.u / width_) * 2.0 * M_PI - M_PI;
        const double lat = (p.v / height_) * M_PI - 0.5 * M_PI;
        const double cl = std::cos(lat);
        return Vec3(cl * std::sin(lon), std::sin(lat), cl * std::cos(lon));
    }
    const double x = (p.u - cx()) / focal_;
    const double y = (p.v - cy()) / focal_;
    const double r2 = x * x + y * y;
    const double disc = 1.0 + (1.0 - xi_ * xi_) * r2;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double eta = (xi_ + std::sqrt(disc)) / (1.0 + r2);
    Vec3 d(eta * x, eta * y, eta - xi_);
    const double n = d.norm();
    if (!(n > 0.0)) {
        return std::nullopt;
    }
    return d / n;
}

Ray CameraModel::unproject(const PixelCoord &p) const {
    auto d = try_unproject(p);
    if (!d) {
        throw DomainError("pixel (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                          ") lies outside the camera model");
    }
    return {Vec3::Zero(), *d};
}

std::optional<PixelCoord> CameraModel::try_project(const Vec3 &point) const {
    const double r = point.norm();
    if (!(r > 0.0) || !std::isfinite(r)) {
        return std::nullopt;
    }
    if (is_erp()) {
        const Vec3 d = point / r;
        double uu = (std::atan2(d.x(), d.z()) + M_PI) / (2.0 * M_PI);
        uu -= std::floor(uu);
        const double vv = (std::asin(std::clamp(d.y(), -1.0, 1.0)) + 0.5 * M_PI) / M_PI;
        return PixelCoord{uu * width_, vv * height_};
    }
    const double beta = point.z() + xi_ * r;
    if (!(beta > 0.0)) {
        return std::nullopt;
    }
    return PixelCoord{focal_ * point.x() / beta + cx(), focal_ * point.y() / beta + cy()};
}

PixelCoord CameraModel::project(const Vec3 &point) const {
    auto p = try_project(point);
    if (!p) {
        throw DomainError("point cannot be projected (behind camera or at origin)");
    }
    return *p;
}

bool CameraModel::in_model(const Vec3 &direction) const {
    const double r = direction.norm();
    if (!(r > 0.0)) {
        return false;
    }
    if (is_erp()) {
        return true;
    }
    const double dz = direction.z() / r;
    if (!(dz + xi_ > 0.0)) {
        return false;
    }
    return xi_ <= 1.0 || 1.0 + xi_ * dz >= 0.0;
}

Mat3 CameraModel::intrinsics() const {
    if (is_erp()) {
        throw DomainError("equirectangular cameras have no intrinsic matrix");
    }
    Mat3 K;
    K << focal_, 0, cx(), 0, focal_, cy(), 0, 0, 1;
    return K;
}

CameraModel CameraModel::resized(int width, int height) const {
    return {kind_, xfov_deg_, xi_, width, height};
}

Grid<Ray> ray_map(const CameraModel &cam, const Pose &pose) {
    Grid<Ray> grid(cam.width(), cam.height());
    parallel::for_rows(cam.height(), [&](int row) {
        for (int col = 0; col < cam.width(); ++col) {
            const auto d = cam.try_unproject(pixel_center(col, row));
            const size_t i = grid.index(row, col);
            if (!d) {
                grid.data[i] = Ray{pose.translation, Vec3::Constant(std::nan(""))};
                continue;
            }
            grid.data[i] = Ray{pose.translation, pose.rotation * *d};
            grid.valid[i] = 1;
        }
    });
    return grid;
}

RectifyMap rectify_map(const CameraModel &src, double xfov_cap_deg) {
    if (src.is_erp()) {
        throw DomainError("rectification requires a unified/pinhole source camera");
    }
    if (!(xfov_cap_deg > 0.0) || !(xfov_cap_deg < 180.0)) {
        throw DomainError("rectification cap must lie in (0, 180) degrees");
    }
    const auto dst = CameraModel::pinhole(std::min(src.xfov_deg(), xfov_cap_deg), src.width(), src.height());
    Grid<Vec2> map(dst.width(), dst.height(), Vec2::Constant(std::nan("")));
    parallel::for_rows(dst.height(), [&](int row) {
        for (int col = 0; col < dst.width(); ++col) {
            const auto d = dst.try_unproject(pixel_center(col, row));
            if (!d || !src.in_model(*d)) {
                continue;
            }
            const auto p = src.try_project(*d);
            if (!p) {
                continue;
            }
            const size_t i = map.index(row, col);
            map.data[i] = Vec2(p->u, p->v);
            map.valid[i] = 1;
        }
    });
    return {dst, std::move(map)};
}

}  // namespace camray
