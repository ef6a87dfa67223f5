#include "camray/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace camray {

Rotation3::Rotation3(const Mat3 &m, double tol) : m_(m) {
    if (!is_valid(m, tol)) {
        throw DomainError("matrix is not a proper rotation");
    }
}

Rotation3 Rotation3::unchecked(const Mat3 &m) {
    Rotation3 r;
    r.m_ = m;
    return r;
}

Rotation3 Rotation3::from_axis_angle(const Vec3 &axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-12) {
        throw DomainError("rotation axis has zero length");
    }
    return unchecked(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix());
}

bool Rotation3::is_valid(const Mat3 &m, double tol) {
    if (!m.allFinite()) {
        return false;
    }
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << 1, 0, 0, 0, c, -s, 0, s, c;
    return Rotation3::unchecked(m);
}

Rotation3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << c, 0, s, 0, 1, 0, -s, 0, c;
    return Rotation3::unchecked(m);
}

Rotation3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return Rotation3::unchecked(m);
}

Pose Pose::from_matrix(const Mat4 &T, double tol) {
    if (!T.allFinite()) {
        throw InputError("pose matrix contains non-finite values");
    }
    if ((T.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() > tol) {
        throw InputError("pose matrix bottom row must be [0 0 0 1]");
    }
    Pose p;
    p.rotation = Rotation3(T.topLeftCorner<3, 3>(), tol);
    p.translation = T.topRightCorner<3, 1>();
    return p;
}

Mat4 Pose::matrix() const {
    Mat4 T = Mat4::Identity();
    T.topLeftCorner<3, 3>() = rotation.matrix();
    T.topRightCorner<3, 1>() = translation;
    return T;
}

Pose Pose::inverse() const {
    Pose p;
    p.rotation = rotation.inverse();
    p.translation = -(p.rotation * translation);
    return p;
}

Pose compose(const Pose &a, const Pose &b) {
    Pose p;
    p.rotation = a.rotation * b.rotation;
    p.translation = a.rotation * b.translation + a.translation;
    return p;
}

Vec3 rodrigues(const Vec3 &axis, double angle, const Vec3 &v) {
    if (std::abs(axis.norm() - 1.0) > 1e-6) {
        throw DomainError("rodrigues: axis must be unit length");
    }
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + axis.cross(v) * s + axis * axis.dot(v) * (1.0 - c);
}

PluckerCoords plucker(const Ray &ray) { return {ray.direction, ray.origin.cross(ray.direction)}; }

double rotation_angle(const Rotation3 &a, const Rotation3 &b) {
    if (a.matrix() == b.matrix()) {
        return 0.0;
    }
    // Same angle as acos((tr − 1)/2), but well conditioned near 0 and π.
    const Mat3 r = a.matrix().transpose() * b.matrix();
    const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
    const double s = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
    return std::atan2(s, c);
}

Mat4 se3_inverse(const Mat4 &T) {
    Mat4 inv = Mat4::Identity();
    const Mat3 Rt = T.topLeftCorner<3, 3>().transpose();
    inv.topLeftCorner<3, 3>() = Rt;
    inv.topRightCorner<3, 1>() = -Rt * T.topRightCorner<3, 1>();
    return inv;
}

}  // namespace camray
