#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace camray {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Raised for inputs outside a model's mathematical domain (exit code 3 in the CLI).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed or missing inputs (exit code 2 in the CLI).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Proper rotation stored as a 3x3 matrix.
class Rotation3 {
public:
    Rotation3() : m_(Mat3::Identity()) {}

    /// Validates orthonormality and det = +1 within `tol`.
    explicit Rotation3(const Mat3 &m, double tol = 1e-9);

    static Rotation3 identity() { return {}; }
    static Rotation3 from_axis_angle(const Vec3 &axis, double angle);
    /// Accepts any matrix without validation. Intended for products of valid rotations.
    static Rotation3 unchecked(const Mat3 &m);

    const Mat3 &matrix() const { return m_; }
    Rotation3 inverse() const { return unchecked(m_.transpose()); }
    Rotation3 operator*(const Rotation3 &o) const { return unchecked(m_ * o.m_); }
    Vec3 operator*(const Vec3 &v) const { return m_ * v; }

    /// ||RᵀR − I||_F and |det − 1| both below `tol`.
    static bool is_valid(const Mat3 &m, double tol = 1e-9);

private:
    Mat3 m_;
};

// Elementary rotations under the x-right, y-down, z-forward convention.
Rotation3 rot_x(double angle);
Rotation3 rot_y(double angle);
Rotation3 rot_z(double angle);

/// Yaw turns about the vertical axis: yaw(90°) maps forward +z onto +x.
inline Rotation3 yaw_rotation(double angle) { return rot_y(angle); }
/// Positive pitch tilts the forward axis toward world up (−y).
inline Rotation3 pitch_rotation(double angle) { return rot_x(angle); }
inline Rotation3 roll_rotation(double angle) { return rot_z(angle); }

/// World up direction under the y-down convention.
inline Vec3 world_up() { return {0.0, -1.0, 0.0}; }

/// Rigid camera-to-world transform.
struct Pose {
    Rotation3 rotation;
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }
    /// Builds from a 4x4 homogeneous matrix; the rotation block is validated with `tol`.
    static Pose from_matrix(const Mat4 &T, double tol = 1e-6);

    Mat4 matrix() const;
    Pose inverse() const;
    Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }
};

/// a ∘ b: first b, then a.
Pose compose(const Pose &a, const Pose &b);
inline Pose operator*(const Pose &a, const Pose &b) { return compose(a, b); }

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
};

struct PluckerCoords {
    Vec3 direction;
    Vec3 moment;
};

/// Rotates `v` by `angle` about the unit `axis`. Throws DomainError if ||axis|| deviates from 1 by more than 1e-6.
Vec3 rodrigues(const Vec3 &axis, double angle, const Vec3 &v);

PluckerCoords plucker(const Ray &ray);

/// Geodesic angle between two rotations in [0, π].
double rotation_angle(const Rotation3 &a, const Rotation3 &b);

/// Inverse of a general SE(3) 4x4 without forming a dense inverse.
Mat4 se3_inverse(const Mat4 &T);

inline double deg2rad(double d) { return d * (M_PI / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / M_PI); }

}  // namespace camray
